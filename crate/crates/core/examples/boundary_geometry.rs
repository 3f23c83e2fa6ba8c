//! Second fundamental form, mean curvature and umbilicity of catalog boundaries.

use reilly::boundary::boundary_geometry;
use reilly::chart::catalog::Geometry;

fn main() -> reilly::Result<()> {
    for g in [Geometry::FlatDisk, Geometry::FlatBall3, Geometry::FlatAnnulus, Geometry::SphericalCap] {
        let m = g.standard(1)?;
        let bg = boundary_geometry(&m)?;
        println!("{}:", g.id());
        for face in &bg.faces {
            let (lo, hi) = face
                .mean_curvature
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &h| (a.min(h), b.max(h)));
            println!("  face {:?}: {} nodes, H in [{lo:.8}, {hi:.8}]", face.face, face.len());
        }
        println!("  umbilicity defect {:.3e}", bg.umbilicity_defect());
    }
    Ok(())
}
