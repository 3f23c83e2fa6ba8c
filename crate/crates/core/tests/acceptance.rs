//! End-to-end acceptance suite. Every criterion prints one PASS/FAIL line
//! followed by the checks it is made of; the process fails if any check does.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use reilly::audits::{audit_eigen_bounds_refined, audit_heintze_karcher, audit_minkowski, AuditReport, Verdict};
use reilly::boundary::boundary_geometry;
use reilly::calculus::{christoffel_and_curvature, differentiate, Mdim};
use reilly::chart::catalog::Geometry;
use reilly::chart::{scalar_fn, Axis, ParamDomain};
use reilly::hypersurface::{audit_almost_schur, newton_tensors, CatalogHypersurface, SchurTarget};
use reilly::integrate::{convergence_order, divergence_identity, richardson, RefinementSeries};
use reilly::reilly::reilly_refinement;
use reilly::spectral::boundary_spectrum;

#[derive(Default)]
struct Criterion {
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn check(&mut self, ok: bool, detail: String) {
        self.checks.push((ok, detail));
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.0)
    }
}

type Run = fn(&mut Criterion) -> reilly::Result<()>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ext(coarse: f64, fine: f64) -> f64 {
    richardson(coarse, fine, 2.0, 2.0)
}

fn reilly_identity(c: &mut Criterion) -> reilly::Result<()> {
    for g in [Geometry::FlatDisk, Geometry::FlatBall3] {
        let start = Instant::now();
        let study = reilly_refinement(4, |level| {
            let m = g
                .standard(level)?
                .with_weights(g.cartesian_fn(1.0, |x| x[0].sin() / 5.0), g.cartesian_fn(1.0, |x| 1.0 + x[0] * x[0] / 4.0))?;
            let f = m.sample(g.cartesian_fn(1.0, |x| x[0] * x[0] + x[1]))?;
            Ok((m, f))
        })?;
        let secs = start.elapsed().as_secs_f64();
        let finest = study.finest().map(|b| b.relative_residual()).unwrap_or(f64::NAN);
        let order = study.order.map(|o| o.order).unwrap_or(f64::NAN);
        c.check(finest < 1e-4, format!("{}: finest |residual|/scale = {finest:.3e} (< 1e-4)", g.id()));
        c.check(order >= 1.8, format!("{}: observed order {order:.3} (>= 1.8)", g.id()));
        c.check(secs < 60.0, format!("{}: four levels in {secs:.1} s (< 60 s)", g.id()));
    }
    Ok(())
}

fn heintze_karcher(c: &mut Criterion) -> reilly::Result<()> {
    for (g, level) in [(Geometry::FlatDisk, 2), (Geometry::FlatBall3, 1)] {
        let m = g.standard(level)?;
        let n = g.dim() as f64;
        let r = audit_heintze_karcher(&m, Mdim::Finite(n))?;
        let defect = r.diagnostic("umbilicity_defect").unwrap_or(f64::NAN);
        c.check(
            rel(r.lhs, r.rhs) < 1e-4 && r.verdict == Verdict::Pass,
            format!("{} m = n: lhs {:.10} rhs {:.10}, |lhs - rhs|/rhs = {:.2e}", g.id(), r.lhs, r.rhs, rel(r.lhs, r.rhs)),
        );
        c.check(defect < 1e-3, format!("{} m = n: umbilicity defect {defect:.2e} (< 1e-3)", g.id()));

        // Unit ball: vol = ω, ∫ V/H dσ = |∂B|/(n−1), |∂B| = nω, so
        // margin = 1 − ω/(((m−1)/m)·nω/(n−1)) = 1 − m(n−1)/((m−1)n).
        let mm = 2.0 * n;
        let r = audit_heintze_karcher(&m, Mdim::Finite(mm))?;
        let hand = 1.0 - mm * (n - 1.0) / ((mm - 1.0) * n);
        c.check(
            r.verdict == Verdict::Pass && (r.relative_margin - hand).abs() < 1e-4 && r.relative_margin >= 0.2 - 1e-4,
            format!(
                "{} m = 2n: margin {:.8} vs closed form {hand:.8} (>= 0.2 up to 1e-4 discretisation)",
                g.id(),
                r.relative_margin
            ),
        );
    }
    Ok(())
}

fn minkowski(c: &mut Criterion) -> reilly::Result<()> {
    for (g, level, exact, label) in [(Geometry::FlatDisk, 2, 4.0 * PI * PI, "4 pi^2"), (Geometry::FlatBall3, 1, 16.0 * PI * PI, "16 pi^2")] {
        let n = g.dim() as f64;
        let r = audit_minkowski(&g.standard(level)?, Mdim::Finite(n))?;
        c.check(
            rel(r.lhs, exact) < 1e-4 && rel(r.rhs, exact) < 1e-4 && r.sharp && r.verdict == Verdict::Pass,
            format!("{}: lhs {:.8} rhs {:.8} ({label} = {exact:.8})", g.id(), r.lhs, r.rhs),
        );
    }
    Ok(())
}

/// Smallest nonzero Steklov eigenvalue of the annulus a < r < b from the
/// radial solutions 1, ln r (mode 0) and r^k, r^-k (mode k).
fn annulus_steklov_oracle(a: f64, b: f64) -> f64 {
    (0..12)
        .flat_map(|k| {
            let kf = k as f64;
            let (v, nu) = if k == 0 {
                (
                    DMatrix::from_row_slice(2, 2, &[1.0, a.ln(), 1.0, b.ln()]),
                    DMatrix::from_row_slice(2, 2, &[0.0, -1.0 / a, 0.0, 1.0 / b]),
                )
            } else {
                (
                    DMatrix::from_row_slice(2, 2, &[a.powf(kf), a.powf(-kf), b.powf(kf), b.powf(-kf)]),
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[-kf * a.powf(kf - 1.0), kf * a.powf(-kf - 1.0), kf * b.powf(kf - 1.0), -kf * b.powf(-kf - 1.0)],
                    ),
                )
            };
            // det(N − pV) = 0 is a quadratic in p.
            let det = |p: f64| (&nu - &v * p).determinant();
            let (d0, d1, dm) = (det(0.0), det(1.0), det(-1.0));
            let qa = 0.5 * (d1 + dm) - d0;
            let qb = 0.5 * (d1 - dm);
            let disc = (qb * qb - 4.0 * qa * d0).max(0.0).sqrt();
            [(-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa)]
        })
        .filter(|p| *p > 1e-9)
        .fold(f64::INFINITY, f64::min)
}

fn steklov(c: &mut Criterion) -> reilly::Result<()> {
    let disk: Vec<f64> =
        (1..4).map(|l| Ok(boundary_spectrum(&Geometry::FlatDisk.standard(l)?, &[])?.steklov.eigenvalue)).collect::<reilly::Result<_>>()?;
    let mut series = RefinementSeries::new();
    for (l, p) in (1..4).zip(&disk) {
        series.push(Geometry::FlatDisk.standard(l)?.domain().max_spacing(), *p)?;
    }
    let order = convergence_order(&series, Some(1.0))?.order;
    c.check((disk[2] - 1.0).abs() < 1e-3, format!("flat-disk: p1 = {:.8} at level 3 (1 +- 1e-3)", disk[2]));
    c.check(order >= 1.5, format!("flat-disk: refinement order {order:.3} over levels 1-3 (>= 1.5)"));

    let ball: Vec<f64> =
        (1..3).map(|l| Ok(boundary_spectrum(&Geometry::FlatBall3.standard(l)?, &[])?.steklov.eigenvalue)).collect::<reilly::Result<_>>()?;
    let p = ext(ball[0], ball[1]);
    c.check((p - 1.0).abs() < 5e-3, format!("flat-ball3: p1 = {p:.8} extrapolated from levels 1, 2 (1 +- 5e-3)"));

    let oracle = annulus_steklov_oracle(0.5, 1.0);
    let p = boundary_spectrum(&Geometry::FlatAnnulus.standard(3)?, &[])?.steklov.eigenvalue;
    c.check(rel(p, oracle) < 1e-3, format!("flat-annulus: p1 = {p:.8}, separation of variables {oracle:.8}"));
    Ok(())
}

fn wentzell(c: &mut Criterion) -> reilly::Result<()> {
    let betas = [0.0, 0.5, 1.0, 2.0];
    for (g, levels) in [(Geometry::FlatDisk, (2, 3)), (Geometry::FlatBall3, (1, 2))] {
        let n = g.dim() as f64;
        let coarse = boundary_spectrum(&g.standard(levels.0)?, &betas)?;
        let fine = boundary_spectrum(&g.standard(levels.1)?, &betas)?;
        for (i, beta) in betas.iter().enumerate() {
            let l = ext(coarse.wentzell[i].eigenvalue, fine.wentzell[i].eigenvalue);
            let exact = 1.0 + beta * (n - 1.0);
            c.check(rel(l, exact) < 1e-3, format!("{} beta = {beta}: lambda = {l:.8} (exact {exact})", g.id()));
        }
        let d = (fine.wentzell[0].eigenvalue - fine.steklov.eigenvalue).abs();
        c.check(d < 1e-10, format!("{} beta = 0: |lambda - p1| = {d:.2e} (< 1e-10)", g.id()));
    }
    Ok(())
}

fn eigen_bounds(c: &mut Criterion) -> reilly::Result<()> {
    for (g, levels) in [(Geometry::FlatDisk, (2, 3)), (Geometry::FlatBall3, (1, 2))] {
        let n = g.dim() as f64;
        let (coarse, fine) = (g.standard(levels.0)?, g.standard(levels.1)?);
        let (reports, _, raw) = audit_eigen_bounds_refined(&coarse, &fine, Mdim::Finite(n), 0.0, 1.0)?;
        let by_name = |name: &str| reports.iter().find(|r| r.name == name);
        let all_pass = reports.len() == 4 && reports.iter().all(|r| r.verdict == Verdict::Pass);
        c.check(
            all_pass,
            format!(
                "{}: {}",
                g.id(),
                reports.iter().map(|r| format!("{} {}", r.name, r.verdict.as_str())).collect::<Vec<_>>().join(", ")
            ),
        );
        for name in ["eta1-lower", "wentzell-upper"] {
            let r: Option<&AuditReport> = by_name(name);
            c.check(
                r.is_some_and(|r| r.sharp && r.relative_margin.abs() < 1e-3),
                format!("{} {name}: sharp with margin {:+.2e}", g.id(), r.map_or(f64::NAN, |r| r.relative_margin)),
            );
        }
        let split = raw.lambda - raw.p1 - raw.beta * raw.eta1;
        c.check(
            split >= -1e-6 * raw.lambda,
            format!("{}: lambda - (p1 + beta eta1) = {split:+.2e} on one grid (>= -1e-6 relative)", g.id()),
        );
    }
    Ok(())
}

/// Independent one-dimensional weights for the polar axis of a sphere chart:
/// Simpson between the first and last node, plus a half-cell core at each
/// pole that is exact for sin-type densities times even quadratics.
fn polar_weights(axis: &Axis) -> Vec<f64> {
    let n = axis.resolution;
    let h = axis.spacing();
    let mut w: Vec<f64> = (0..n)
        .map(|j| h / 3.0 * if j == 0 || j + 1 == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 })
        .collect();
    // ∫_0^ε r^p {1, r²} dr = ε (w0 ε^p {1, ε²} + w1 (3ε)^p {1, 9ε²}), p = 1.
    let a = nalgebra::Matrix2::new(1.0, 3.0, 1.0, 27.0);
    let core = a.lu().solve(&nalgebra::Vector2::new(0.5, 0.25)).expect("regular moment system");
    let eps = 0.5 * h;
    for (end, next) in [(0, 1), (n - 1, n - 2)] {
        w[end] += eps * core[0];
        w[next] += eps * core[1];
    }
    w
}

/// Mean-curvature almost-Schur integrals ∫ (H − H̄)² dA and ∫ |II − (H/2)g|² dA
/// of a spheroid: first by direct summation over the discrete fields, then
/// from closed-form curvatures by a fine one-dimensional Simpson rule.
fn spheroid_integrals(hs: &reilly::hypersurface::EmbeddedHypersurface, c: f64) -> ((f64, f64), (f64, f64)) {
    let m = &hs.manifold;
    let d = m.domain();
    let wt = polar_weights(d.axis(0));
    let hpsi = d.spacing(1);
    let mut area = 0.0;
    let mut h_int = 0.0;
    let mut per_node = Vec::with_capacity(d.len());
    for k in 0..d.len() {
        let g = m.metric().matrix_at(k);
        let b = hs.second_fundamental_form.matrix_at(k);
        let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        let gi = DMatrix::from_row_slice(2, 2, &[g[(1, 1)] / det, -g[(0, 1)] / det, -g[(1, 0)] / det, g[(0, 0)] / det]);
        let h = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| gi[(i, j)] * b[(i, j)]).sum::<f64>();
        let ring = &b - &g * (h / 2.0);
        let s = &gi * &ring;
        let sq = (&s * &s).trace();
        let w = wt[d.coord_index(k, 0)] * hpsi * det.sqrt();
        area += w;
        h_int += w * h;
        per_node.push((w, h, sq));
    }
    let mean = h_int / area;
    let direct = per_node.iter().fold((0.0, 0.0), |(a, b), &(w, h, sq)| (a + w * (h - mean).powi(2), b + w * sq));

    let n = 200_001;
    let dt = PI / (n - 1) as f64;
    let simpson = |f: &dyn Fn(f64) -> f64| {
        (0..n).map(|j| f(j as f64 * dt) * if j == 0 || j + 1 == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 }).sum::<f64>()
            * dt
            / 3.0
    };
    let speed = |t: f64| (t.cos().powi(2) + c * c * t.sin().powi(2)).sqrt();
    let k1 = |t: f64| c / speed(t).powi(3);
    let k2 = |t: f64| c / speed(t);
    let da = |t: f64| 2.0 * PI * t.sin() * speed(t);
    let area = simpson(&|t| da(t));
    let mean = simpson(&|t| da(t) * (k1(t) + k2(t))) / area;
    let closed = (
        simpson(&|t| da(t) * (k1(t) + k2(t) - mean).powi(2)),
        simpson(&|t| da(t) * 0.5 * (k1(t) - k2(t)).powi(2)),
    );
    (direct, closed)
}

fn almost_schur(c: &mut Criterion) -> reilly::Result<()> {
    let sphere = CatalogHypersurface::Sphere { radius: 1.0 }.build(2, 8)?;
    for target in [SchurTarget::MeanCurvature, SchurTarget::Newton(1)] {
        let r = audit_almost_schur(&sphere.manifold, &target, Some(&sphere.second_fundamental_form), None)?;
        c.check(
            r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10 && r.verdict == Verdict::Pass,
            format!("unit sphere in R^3, {}: lhs {:.2e} rhs {:.2e}", r.name, r.lhs, r.rhs),
        );
    }
    let r = audit_almost_schur(&Geometry::RoundSphere2.standard(2)?.with_stencil_order(8), &SchurTarget::ScalarCurvature, None, None)?;
    c.check(
        r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10 && r.verdict == Verdict::Pass,
        format!("round S^2, {}: lhs {:.2e} rhs {:.2e}", r.name, r.lhs, r.rhs),
    );
    let s3 = Geometry::RoundSphere3.standard(2)?.with_stencil_order(8);
    for k in [1, 2] {
        let r = audit_almost_schur(&s3, &SchurTarget::Schouten { k, conformally_flat: true }, None, None)?;
        c.check(
            r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10 && r.verdict == Verdict::Pass,
            format!("round S^3 (stencil order 8, level 2), {}: lhs {:.2e} rhs {:.2e}", r.name, r.lhs, r.rhs),
        );
    }

    let cz = 1.2;
    let hs = CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: cz }.build(3, 8)?;
    let r = audit_almost_schur(&hs.manifold, &SchurTarget::MeanCurvature, Some(&hs.second_fundamental_form), None)?;
    c.check(
        r.verdict == Verdict::Pass && r.relative_margin > 0.0,
        format!("ellipsoid (1, 1, 1.2), {}: lhs {:.8e} rhs {:.8e} margin {:+.4}", r.name, r.lhs, r.rhs, r.relative_margin),
    );
    let factor = 0.25;
    let cst = r.diagnostic("schur_constant").unwrap_or(f64::NAN);
    let (tool_dev, tool_ring) = (r.lhs / factor, r.rhs / cst);
    let (direct, closed) = spheroid_integrals(&hs, cz);
    c.check(
        rel(tool_dev, direct.0) < 1e-8 && rel(tool_ring, direct.1) < 1e-8,
        format!(
            "ellipsoid integrals vs direct summation: {:.2e}, {:.2e} relative (< 1e-8)",
            rel(tool_dev, direct.0),
            rel(tool_ring, direct.1)
        ),
    );
    c.check(
        rel(tool_dev, closed.0) < 1e-4 && rel(tool_ring, closed.1) < 1e-4,
        format!(
            "ellipsoid integrals vs closed-form curvatures: {:.2e}, {:.2e} relative (< 1e-4)",
            rel(tool_dev, closed.0),
            rel(tool_ring, closed.1)
        ),
    );
    Ok(())
}

/// e_r as the sum of principal r×r minors.
fn principal_minor_sum(b: &DMatrix<f64>, r: usize) -> f64 {
    let n = b.nrows();
    if r == 0 {
        return 1.0;
    }
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == r)
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            DMatrix::from_fn(r, r, |i, j| b[(idx[i], idx[j])]).determinant()
        })
        .sum()
}

fn symmetric_functions(c: &mut Criterion) -> reilly::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut trace_err, mut minor_err, mut poly_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=5);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        let b = (&a + a.transpose()) * 0.5;
        let (s, p) = newton_tensors(&b);
        for r in 0..=n {
            trace_err = trace_err.max((p[r].trace() - (n - r) as f64 * s[r]).abs());
            minor_err = minor_err.max((s[r] - principal_minor_sum(&b, r)).abs());
            // Closed form P_r = Σ_j (−1)^j S_{r−j} B^j.
            let mut closed = DMatrix::zeros(n, n);
            let mut power = DMatrix::identity(n, n);
            for j in 0..=r {
                closed += &power * (if j % 2 == 0 { 1.0 } else { -1.0 } * principal_minor_sum(&b, r - j));
                power = &power * &b;
            }
            poly_err = poly_err.max((&p[r] - closed).abs().max());
        }
    }
    c.check(trace_err < 1e-10, format!("max |tr P_r - (n - r) S_r| = {trace_err:.2e} over 1000 matrices"));
    c.check(minor_err < 1e-10, format!("max |S_r - sum of principal minors| = {minor_err:.2e}"));
    c.check(poly_err < 1e-10, format!("max |P_r(recursion) - P_r(closed form)| = {poly_err:.2e}"));
    Ok(())
}

fn operator_oracles(c: &mut Criterion) -> reilly::Result<()> {
    let d = ParamDomain::new(vec![Axis::bounded("x", -1.0, 1.0, 13), Axis::bounded("y", 0.0, 2.0, 17)])?;
    let f = |x: f64, y: f64| 1.0 - 2.0 * x + 3.0 * x * y + 0.5 * x.powi(4) - y.powi(3) + 2.0 * x * x * y * y;
    let fx = |x: f64, y: f64| -2.0 + 3.0 * y + 2.0 * x.powi(3) + 4.0 * x * y * y;
    let fyy = |x: f64, _y: f64| -6.0 * _y + 4.0 * x * x;
    let values: Vec<f64> = (0..d.len()).map(|k| d.point(k)).map(|p| f(p[0], p[1])).collect();
    let mut err = 0.0f64;
    for accuracy in [4, 6, 8] {
        let dx = differentiate(&d, &values, 0, 0, 1, accuracy)?;
        let dyy = differentiate(&d, &values, 0, 1, 2, accuracy)?;
        for k in 0..d.len() {
            let p = d.point(k);
            err = err.max((dx[k] - fx(p[0], p[1])).abs()).max((dyy[k] - fyy(p[0], p[1])).abs());
        }
    }
    c.check(err < 1e-10, format!("degree-4 polynomial, d/dx and d2/dy2 at orders 4, 6, 8: max error {err:.2e}"));

    let mut series = RefinementSeries::new();
    for level in 0..4 {
        let m = Geometry::RoundSphere2.standard(level)?;
        let (_, ric) = christoffel_and_curvature(&m)?;
        series.push(m.domain().max_spacing(), ric.max_deviation(|k| m.metric().matrix_at(k)))?;
    }
    let order = convergence_order(&series, None)?.order;
    c.check(order >= 1.8, format!("round S^2: max |Ric - g| refinement order {order:.3} (>= 1.8)"));

    let mut series = RefinementSeries::new();
    for level in 0..4 {
        let m = Geometry::FlatDisk.standard(level)?.with_weights(scalar_fn(|p| 0.3 * p[0] * p[1].cos()), scalar_fn(|_| 1.0))?;
        let bg = boundary_geometry(&m)?;
        let d = m.domain();
        let x: Vec<Vec<f64>> = vec![
            (0..m.len()).map(|k| d.point(k)[0].powi(2)).collect(),
            (0..m.len()).map(|k| d.point(k)[1].sin()).collect(),
        ];
        let (lhs, rhs) = divergence_identity(&m, &bg, &x)?;
        series.push(d.max_spacing(), (lhs - rhs).abs())?;
    }
    let order = convergence_order(&series, None)?.order;
    c.check(order >= 1.8, format!("weighted Stokes on the disk: residual order {order:.3} (>= 1.8)"));
    Ok(())
}

fn determinism(c: &mut Criterion) -> reilly::Result<()> {
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/disk_tour.toml");
    let run = || Command::new(env!("CARGO_BIN_EXE_reilly")).args(["run", scenario]).output();
    let (a, b) = (run()?, run()?);
    c.check(a.status.code() == Some(0), format!("reilly run disk_tour.toml exits with {:?}", a.status.code()));
    c.check(!a.stdout.is_empty() && a.stdout == b.stdout, format!("two runs: {} and {} bytes of JSON, identical = {}", a.stdout.len(), b.stdout.len(), a.stdout == b.stdout));
    Ok(())
}

fn main() {
    let criteria: [(&str, Run); 10] = [
        ("weighted Reilly identity", reilly_identity),
        ("Heintze-Karcher sharpness", heintze_karcher),
        ("Minkowski sharpness", minkowski),
        ("Steklov spectrum", steklov),
        ("Wentzell spectrum", wentzell),
        ("eigenvalue bounds", eigen_bounds),
        ("almost-Schur", almost_schur),
        ("symmetric-function algebra", symmetric_functions),
        ("operator oracles", operator_oracles),
        ("determinism", determinism),
    ];
    // The Reilly criterion is timed, so it runs alone before the rest.
    let mut results = vec![run_one(criteria[0].1)];
    results.extend(criteria[1..].par_iter().map(|(_, f)| run_one(*f)).collect::<Vec<_>>());
    let mut failed = 0;
    for (i, ((title, _), (c, secs))) in criteria.iter().zip(&results).enumerate() {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        if !c.passed() {
            failed += 1;
        }
        println!("criterion {:>2} {title:<28} {verdict} ({secs:.1} s)", i + 1);
        for (ok, detail) in &c.checks {
            println!("    [{}] {detail}", if *ok { "ok" } else { "FAIL" });
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn run_one(f: Run) -> (Criterion, f64) {
    let start = Instant::now();
    let mut c = Criterion::default();
    if let Err(e) = f(&mut c) {
        c.check(false, format!("error: {e}"));
    }
    (c, start.elapsed().as_secs_f64())
}
