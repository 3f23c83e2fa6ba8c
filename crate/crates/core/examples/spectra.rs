//! First nonzero eigenvalues of the closed, boundary, Steklov and Wentzell
//! problems against closed forms, with Richardson extrapolation.

use reilly::chart::catalog::Geometry;
use reilly::integrate::richardson;
use reilly::spectral::{boundary_spectrum, eigen_closed};

fn main() -> reilly::Result<()> {
    let closed: Vec<f64> =
        (1..3).map(|l| Ok(eigen_closed(&Geometry::RoundSphere2.standard(l)?)?.eigenvalue)).collect::<reilly::Result<_>>()?;
    println!("S2 closed: {:.8} (exact 2), extrapolated {:.8}", closed[1], richardson(closed[0], closed[1], 2.0, 2.0));

    let betas = [0.0, 0.5, 1.0, 2.0];
    let coarse = boundary_spectrum(&Geometry::FlatDisk.standard(2)?, &betas)?;
    let fine = boundary_spectrum(&Geometry::FlatDisk.standard(3)?, &betas)?;
    let ext = |a: f64, b: f64| richardson(a, b, 2.0, 2.0);
    println!("disk Steklov p1 = {:.8} (exact 1)", ext(coarse.steklov.eigenvalue, fine.steklov.eigenvalue));
    println!("disk boundary eta1 = {:.8} (exact 1)", ext(coarse.boundary.eigenvalue, fine.boundary.eigenvalue));
    for (i, beta) in betas.iter().enumerate() {
        let l = ext(coarse.wentzell[i].eigenvalue, fine.wentzell[i].eigenvalue);
        println!("disk Wentzell beta = {beta}: {l:.8} (exact {})", 1.0 + beta);
    }
    let annulus = boundary_spectrum(&Geometry::FlatAnnulus.standard(3)?, &[])?;
    println!("annulus Steklov p1 = {:.8}", annulus.steklov.eigenvalue);
    Ok(())
}
