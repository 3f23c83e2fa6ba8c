//! Embedded surfaces in space forms: principal curvatures against closed
//! forms, the Codazzi defect and the Newton-transformation trace identity.

use reilly::hypersurface::{newton_transforms, CatalogHypersurface};

fn main() -> reilly::Result<()> {
    let surfaces = [
        CatalogHypersurface::Sphere { radius: 2.0 },
        CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 },
        CatalogHypersurface::Torus { major: 2.0, minor: 1.0 },
        CatalogHypersurface::SphereInS3 { radius: 0.7 },
        CatalogHypersurface::SphereInH3 { radius: 0.7 },
    ];
    for s in surfaces {
        let hs = s.build(2, 4)?;
        let d = hs.manifold.domain();
        let err = (0..d.len())
            .filter_map(|k| {
                let exact = s.principal_curvatures(&d.point(k))?;
                Some(exact.iter().zip(&hs.principal_curvatures[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            })
            .fold(0.0, f64::max);
        let sf = newton_transforms(&hs);
        println!(
            "{:<13} curvature error {:.2e}  Codazzi {:.2e}  tr P_r defect {:.2e}  model defect {:.1e}",
            s.id(),
            err,
            hs.codazzi_defect()?,
            sf.trace_defect,
            hs.model_defect
        );
    }
    Ok(())
}
