//! Build every catalog chart and report its grid, volume and boundary.

use reilly::boundary::boundary_geometry;
use reilly::chart::catalog::Geometry;
use reilly::integrate::{integrate_boundary, integrate_weighted_volume};

fn main() -> reilly::Result<()> {
    println!("{:<14} {:>3} {:>8} {:>14} {:>14}", "geometry", "n", "nodes", "volume", "boundary area");
    for g in Geometry::ALL {
        let m = g.standard(1)?;
        let ones = vec![1.0; m.len()];
        let volume = integrate_weighted_volume(&m, &ones);
        let area = if g.is_closed() {
            "closed".to_string()
        } else {
            let bg = boundary_geometry(&m)?;
            let ones: Vec<Vec<f64>> = bg.faces.iter().map(|f| vec![1.0; f.len()]).collect();
            format!("{:.10}", integrate_boundary(&bg, &ones))
        };
        println!("{:<14} {:>3} {:>8} {:>14.10} {:>14}", g.id(), g.dim(), m.len(), volume, area);
    }
    Ok(())
}
