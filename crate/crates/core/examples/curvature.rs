//! Finite-difference Christoffel symbols and Ricci curvature against the
//! closed forms Ric = g on S² and R = 6 on S³.

use reilly::calculus::{christoffel_and_curvature, scalar_curvature};
use reilly::chart::catalog::Geometry;
use reilly::integrate::{convergence_order, RefinementSeries};

fn main() -> reilly::Result<()> {
    for order in [4, 2] {
        let mut series = RefinementSeries::new();
        for level in 0..4 {
            let m = Geometry::RoundSphere2.standard(level)?.with_stencil_order(order);
            let (_, ric) = christoffel_and_curvature(&m)?;
            let err = ric.max_deviation(|k| m.metric().matrix_at(k));
            let h = m.domain().max_spacing();
            println!("S2, stencil order {order}, level {level}: h = {h:.4e}  max |Ric - g| = {err:.3e}");
            series.push(h, err)?;
        }
        println!("S2, stencil order {order}: observed order {:.3}", convergence_order(&series, None)?.order);
    }
    println!("(second-order stencils lose two orders at the nodes next to the poles, where g^{{psi psi}} ~ 1/h^2)");

    for order in [4, 6, 8] {
        for level in 0..3 {
            let m = Geometry::RoundSphere3.standard(level)?.with_stencil_order(order);
            let (_, ric) = christoffel_and_curvature(&m)?;
            let r = scalar_curvature(&m, &ric);
            let err = r.values().iter().map(|x| (x - 6.0).abs()).fold(0.0, f64::max);
            println!("S3, stencil order {order}, level {level}: max |R - 6| = {err:.3e}");
        }
    }
    println!("(next to both poles of S3, g^{{psi psi}} ~ 1/h^4: stencils of order p leave an O(h^(p-4)) error there)");
    Ok(())
}
