//! Heintze-Karcher and Minkowski audits: sharp on balls at m = n, strict at
//! m = 2n, and a hypothesis failure for a concave potential.

use reilly::audits::{audit_heintze_karcher, audit_minkowski, AuditReport};
use reilly::calculus::Mdim;
use reilly::chart::catalog::Geometry;
use reilly::chart::scalar_fn;

fn show(geometry: &str, r: &AuditReport) {
    println!(
        "{geometry:<11} {:<16} lhs = {:.10}  rhs = {:.10}  margin = {:+.3e}  sharp = {:<5}  {}",
        r.name,
        r.lhs,
        r.rhs,
        r.relative_margin,
        r.sharp,
        r.verdict.as_str()
    );
}

fn main() -> reilly::Result<()> {
    for (g, level) in [(Geometry::FlatDisk, 2), (Geometry::FlatBall3, 1)] {
        let m = g.standard(level)?;
        let n = g.dim() as f64;
        for mdim in [Mdim::Finite(n), Mdim::Finite(2.0 * n)] {
            show(g.id(), &audit_heintze_karcher(&m, mdim)?);
            show(g.id(), &audit_minkowski(&m, mdim)?);
        }
    }
    let m = Geometry::FlatDisk.standard(2)?.with_weights(scalar_fn(|_| 0.0), scalar_fn(|p| 1.0 - p[0] * p[0] / 4.0))?;
    let r = audit_heintze_karcher(&m, Mdim::Finite(2.0))?;
    show("disk, V=1-r^2/4", &r);
    for h in &r.hypotheses {
        println!("    {} satisfied = {} witness = {:.4e}", h.name, h.satisfied, h.witness);
    }
    Ok(())
}
