//! Weighted quadrature, convergence orders, Richardson extrapolation and the
//! discrete divergence theorem.

use std::f64::consts::PI;

use reilly::boundary::boundary_geometry;
use reilly::chart::catalog::Geometry;
use reilly::chart::scalar_fn;
use reilly::integrate::{convergence_order, divergence_identity, integrate_weighted_volume, richardson, RefinementSeries};

fn main() -> reilly::Result<()> {
    let exact = 4.0 * PI / 15.0;
    let mut series = RefinementSeries::new();
    let mut values = Vec::new();
    for level in 0..4 {
        let m = Geometry::FlatBall3.standard(level)?;
        let x2 = m.sample(Geometry::FlatBall3.cartesian_fn(1.0, |x| x[0] * x[0]))?;
        let value = integrate_weighted_volume(&m, x2.values());
        let h = m.domain().max_spacing();
        println!("ball level {level}: h = {h:.4e}  int x^2 = {value:.14}  error = {:.3e}", (value - exact).abs());
        series.push(h, value)?;
        values.push(value);
    }
    let est = convergence_order(&series, Some(exact))?;
    println!("observed order {:.3} (plateau: {})", est.order, est.plateau);
    let r = richardson(values[2], values[3], 2.0, 2.0);
    println!("Richardson from levels 2, 3: {r:.14}  error = {:.3e}", (r - exact).abs());

    let m = Geometry::FlatDisk.standard(2)?.with_weights(scalar_fn(|p| 0.3 * p[0] * p[1].cos()), scalar_fn(|_| 1.0))?;
    let bg = boundary_geometry(&m)?;
    let d = m.domain();
    let x: Vec<Vec<f64>> = vec![
        (0..m.len()).map(|k| d.point(k)[0].powi(2)).collect(),
        (0..m.len()).map(|k| d.point(k)[1].sin()).collect(),
    ];
    let (lhs, rhs) = divergence_identity(&m, &bg, &x)?;
    println!("weighted Stokes on the disk: volume side {lhs:.12}, boundary side {rhs:.12}");
    Ok(())
}
