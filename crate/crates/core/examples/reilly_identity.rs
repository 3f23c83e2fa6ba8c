//! The six terms of the weighted Reilly identity and their vanishing sum
//! under refinement, on the unit ball with V = 1 + x²/4, φ = sin(x)/5.

use reilly::chart::catalog::Geometry;
use reilly::reilly::reilly_refinement;

fn main() -> reilly::Result<()> {
    let g = Geometry::FlatBall3;
    let study = reilly_refinement(4, |level| {
        let m = g
            .standard(level)?
            .with_weights(g.cartesian_fn(1.0, |x| x[0].sin() / 5.0), g.cartesian_fn(1.0, |x| 1.0 + x[0] * x[0] / 4.0))?;
        let f = m.sample(g.cartesian_fn(1.0, |x| x[0] * x[0] + x[1]))?;
        Ok((m, f))
    })?;
    let finest = study.finest().expect("four levels");
    let names = ["boundary II^V", "boundary H_phi", "boundary cross", "interior square", "interior Hessian", "interior Ricci"];
    for (name, t) in names.iter().zip(finest.terms()) {
        println!("{name:>18}: {t:+.12e}");
    }
    for b in &study.levels {
        println!("h = {:.4e}  |residual|/scale = {:.3e}", b.h, b.relative_residual());
    }
    if let Some(order) = study.order {
        println!("observed order {:.3}", order.order);
    }
    Ok(())
}
