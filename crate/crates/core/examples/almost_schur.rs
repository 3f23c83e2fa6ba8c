//! Almost-Schur audits: exact equality on round spheres and a strict
//! inequality on an ellipsoid.

use reilly::audits::AuditReport;
use reilly::chart::catalog::Geometry;
use reilly::hypersurface::{audit_almost_schur, CatalogHypersurface, SchurTarget};

fn show(label: &str, r: &AuditReport) {
    println!(
        "{label:<22} {:<18} lhs = {:.4e}  rhs = {:.4e}  C = {:.4}  {}",
        r.name,
        r.lhs,
        r.rhs,
        r.diagnostic("schur_constant").unwrap_or(f64::NAN),
        r.verdict.as_str()
    );
}

fn main() -> reilly::Result<()> {
    for (label, s) in [
        ("sphere", CatalogHypersurface::Sphere { radius: 1.0 }),
        ("ellipsoid (1, 1, 1.2)", CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 }),
    ] {
        let hs = s.build(2, 4)?;
        let shape = Some(&hs.second_fundamental_form);
        for target in [SchurTarget::MeanCurvature, SchurTarget::Newton(1), SchurTarget::ScalarCurvature] {
            show(label, &audit_almost_schur(&hs.manifold, &target, shape, None)?);
        }
    }
    let s3 = Geometry::RoundSphere3.standard(1)?.with_stencil_order(8);
    let target = SchurTarget::Schouten { k: 2, conformally_flat: true };
    show("round S3", &audit_almost_schur(&s3, &target, None, None)?);
    Ok(())
}
