//! Eigenvalue bounds for the boundary, Steklov and Wentzell problems on the
//! unit disk, with eigenvalues extrapolated from two grids.

use reilly::audits::audit_eigen_bounds_refined;
use reilly::calculus::Mdim;
use reilly::chart::catalog::Geometry;

fn main() -> reilly::Result<()> {
    let g = Geometry::FlatDisk;
    let (coarse, fine) = (g.standard(2)?, g.standard(3)?);
    for beta in [0.5, 1.0, 2.0] {
        let (reports, ext, raw) = audit_eigen_bounds_refined(&coarse, &fine, Mdim::Finite(2.0), 0.0, beta)?;
        println!("beta = {beta}: eta1 = {:.8}, p1 = {:.8}, lambda = {:.8}", ext.eta1, ext.p1, ext.lambda);
        for r in &reports {
            println!(
                "  {:<15} lhs = {:.8}  rhs = {:.8}  margin = {:+.2e}  sharp = {:<5}  {}",
                r.name,
                r.lhs,
                r.rhs,
                r.relative_margin,
                r.sharp,
                r.verdict.as_str()
            );
        }
        println!("  lambda - (p1 + beta eta1) on one grid: {:+.3e}", raw.lambda - raw.p1 - beta * raw.eta1);
    }
    Ok(())
}
