//! Numerical audits of the Heintze–Karcher, Minkowski and eigenvalue
//! inequalities, with hypothesis checks, margins and sharpness flags.

use serde::Serialize;

use crate::boundary::{boundary_geometry, hypothesis_constants, BoundaryGeometry, HypothesisConstants};
use crate::calculus::{min_generalized_eigenvalue, resolved_hat_ric_min, Mdim, ResolvedMinimum};
use crate::chart::ChartManifold;
use crate::error::{Error, Result};
use crate::integrate::{integrate_boundary, integrate_weighted_volume, richardson};
use crate::spectral::boundary_spectrum;

/// Relative margin below which an audit is flagged sharp.
pub const SHARP_TOLERANCE: f64 = 1e-3;
/// Relative violation tolerated by the integral audits.
pub const INTEGRAL_TOLERANCE: f64 = 1e-6;
/// Relative violation tolerated by the eigenvalue audits.
pub const EIGEN_TOLERANCE: f64 = 1e-3;
/// Relative tolerance of the integral audits when comparing against an exact margin.
pub const MARGIN_TOLERANCE: f64 = 1e-4;
/// Relative size of a negative discriminant that is clamped to zero.
pub const DISCRIMINANT_TOLERANCE: f64 = 1e-3;

/// Outcome of an audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "HYPOTHESIS_UNMET")]
    HypothesisUnmet,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::HypothesisUnmet => "HYPOTHESIS_UNMET",
        }
    }
}

/// A checked hypothesis with the value that decided it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    pub witness: f64,
}

impl Hypothesis {
    pub fn new(name: &str, satisfied: bool, witness: f64) -> Self {
        Self { name: name.to_string(), satisfied, witness }
    }

    /// `witness > 0`.
    pub fn positive(name: &str, witness: f64) -> Self {
        Self::new(name, witness > 0.0, witness)
    }

    /// `witness ≥ −tolerance`.
    pub fn nonnegative(name: &str, witness: f64, tolerance: f64) -> Self {
        Self::new(name, witness >= -tolerance, witness)
    }
}

/// Direction of the audited inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// lhs ≤ rhs.
    AtMost,
    /// lhs ≥ rhs.
    AtLeast,
    /// lhs > rhs.
    Greater,
}

/// A named inequality evaluated on a discrete geometry.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed relative slack, positive when the inequality holds.
    pub relative_margin: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub sharp: bool,
    pub verdict: Verdict,
    #[serde(skip)]
    pub relation: Relation,
    /// Extra quantities such as equality-case defects.
    #[serde(skip)]
    pub diagnostics: Vec<(String, f64)>,
}

/// Relative slack of `lhs relation rhs`, positive when it holds.
pub fn relative_margin(lhs: f64, rhs: f64, relation: Relation) -> f64 {
    scaled_margin(lhs, rhs, relation, 1e-10)
}

/// Slack relative to max(|lhs|, |rhs|, floor).
pub fn scaled_margin(lhs: f64, rhs: f64, relation: Relation, floor: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs()).max(floor);
    match relation {
        Relation::AtMost => (rhs - lhs) / scale,
        Relation::AtLeast | Relation::Greater => (lhs - rhs) / scale,
    }
}

impl AuditReport {
    pub fn new(
        name: &str,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        hypotheses: Vec<Hypothesis>,
        tolerance: f64,
    ) -> Self {
        Self::with_scale(name, lhs, rhs, relation, hypotheses, tolerance, 1e-10)
    }

    /// As [`AuditReport::new`], with the margin taken relative to at least `floor`.
    pub fn with_scale(
        name: &str,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        hypotheses: Vec<Hypothesis>,
        tolerance: f64,
        floor: f64,
    ) -> Self {
        let relative_margin = scaled_margin(lhs, rhs, relation, floor.max(1e-10));
        let holds = match relation {
            Relation::Greater => relative_margin > 0.0,
            _ => relative_margin >= -tolerance,
        };
        let verdict = if hypotheses.iter().any(|h| !h.satisfied) {
            Verdict::HypothesisUnmet
        } else if holds && relative_margin.is_finite() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let sharp = relation != Relation::Greater && relative_margin.abs() < SHARP_TOLERANCE;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relative_margin,
            hypotheses,
            sharp,
            verdict,
            relation,
            diagnostics: Vec::new(),
        }
    }

    pub fn with_diagnostic(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.push((name.to_string(), value));
        self
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

fn ratio(mdim: Mdim, num: f64, den: f64) -> f64 {
    match mdim {
        Mdim::Finite(m) => (m + num) / (m + den),
        Mdim::Infinite => 1.0,
    }
}

fn hat_ric_hypothesis(hat: &ResolvedMinimum) -> Hypothesis {
    Hypothesis::nonnegative("hat_ric_v_nonnegative", hat.witness(|_| 1.0).0, hat.tolerance())
}

fn boundary_values<F: Fn(&crate::boundary::FaceGeometry, usize) -> f64>(bg: &BoundaryGeometry, f: F) -> Vec<Vec<f64>> {
    bg.faces.iter().map(|face| (0..face.len()).map(|j| f(face, j)).collect()).collect()
}

fn min_h_phi(bg: &BoundaryGeometry) -> f64 {
    bg.faces.iter().flat_map(|f| f.h_phi.iter().copied()).fold(f64::INFINITY, f64::min)
}

/// ∫_M V dμ ≤ ((m−1)/m) ∫_∂M V/H_φ dσ under R̂ic^V_{φ,m} ≥ 0 and H_φ > 0.
/// Reports the umbilicity defect max‖II − (H/(n−1)) ḡ‖ as a diagnostic.
pub fn audit_heintze_karcher(m: &ChartManifold, mdim: Mdim) -> Result<AuditReport> {
    let n = m.dim();
    mdim.validate(n, m.phi_is_constant())?;
    let bg = boundary_geometry(m)?;
    let hat = resolved_hat_ric_min(m, mdim)?;
    let lhs = integrate_weighted_volume(m, m.v().values());
    let integrand = boundary_values(&bg, |face, j| face.chart.v().value(j) / face.h_phi[j]);
    let rhs = ratio(mdim, -1.0, 0.0) * integrate_boundary(&bg, &integrand);
    let hypotheses = vec![hat_ric_hypothesis(&hat), Hypothesis::positive("h_phi_positive", min_h_phi(&bg))];
    Ok(AuditReport::new("heintze-karcher", lhs, rhs, Relation::AtMost, hypotheses, INTEGRAL_TOLERANCE)
        .with_diagnostic("umbilicity_defect", bg.umbilicity_defect()))
}

/// (∫_∂M V dσ)² ≥ (m/(m−1)) ∫_M V dμ ∫_∂M V H_φ dσ under R̂ic^V_{φ,m} ≥ 0
/// and II^V ≥ 0. Reports max H − min H as a diagnostic.
pub fn audit_minkowski(m: &ChartManifold, mdim: Mdim) -> Result<AuditReport> {
    let n = m.dim();
    mdim.validate(n, m.phi_is_constant())?;
    let bg = boundary_geometry(m)?;
    let hat = resolved_hat_ric_min(m, mdim)?;
    let v_b = boundary_values(&bg, |face, j| face.chart.v().value(j));
    let vh = boundary_values(&bg, |face, j| face.chart.v().value(j) * face.h_phi[j]);
    let area = integrate_boundary(&bg, &v_b);
    let lhs = area * area;
    let rhs = ratio(mdim, 0.0, -1.0) * integrate_weighted_volume(m, m.v().values()) * integrate_boundary(&bg, &vh);
    let ii_min = bg
        .faces
        .iter()
        .flat_map(|face| (0..face.len()).map(move |j| min_generalized_eigenvalue(&face.ii_v.matrix_at(j), &face.gbar().matrix_at(j))))
        .fold(f64::INFINITY, f64::min);
    let ii_scale = bg.faces.iter().flat_map(|f| f.mean_curvature.iter()).fold(1.0f64, |a, h| a.max(h.abs()));
    let hypotheses = vec![
        hat_ric_hypothesis(&hat),
        Hypothesis::nonnegative("ii_v_nonnegative", ii_min, ResolvedMinimum::TOLERANCE * ii_scale),
    ];
    Ok(AuditReport::new("minkowski", lhs, rhs, Relation::AtLeast, hypotheses, INTEGRAL_TOLERANCE)
        .with_diagnostic("mean_curvature_spread", bg.mean_curvature_spread()))
}

/// C_{n,K₁,K₂,η₁} = (n−1)/n + [(n−1)K₁ + K₂ + 2√((η₁ + (n−1)K₁)K₂)]/η₁.
pub fn schur_constant(n: usize, k1: f64, k2: f64, eta1: f64) -> Result<f64> {
    if !(eta1 > 0.0) {
        return Err(Error::NonpositiveEigenvalue(eta1));
    }
    let nf = n as f64;
    let inner = ((eta1 + (nf - 1.0) * k1) * k2).max(0.0);
    Ok((nf - 1.0) / nf + ((nf - 1.0) * k1 + k2 + 2.0 * inner.sqrt()) / eta1)
}

/// η₁ of the boundary problem, p₁ (Steklov) and λ_{1,β} (Wentzell).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralValues {
    pub eta1: f64,
    pub p1: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl SpectralValues {
    /// Eigenvalues of one discretisation.
    pub fn compute(m: &ChartManifold, beta: f64) -> Result<Self> {
        let s = boundary_spectrum(m, &[beta])?;
        Ok(Self { eta1: s.boundary.eigenvalue, p1: s.steklov.eigenvalue, lambda: s.wentzell[0].eigenvalue, beta })
    }

    /// Second-order Richardson extrapolation from a grid and its refinement by 2.
    pub fn extrapolate(coarse: &Self, fine: &Self) -> Self {
        let r = |a: f64, b: f64| richardson(a, b, 2.0, 2.0);
        Self {
            eta1: r(coarse.eta1, fine.eta1),
            p1: r(coarse.p1, fine.p1),
            lambda: r(coarse.lambda, fine.lambda),
            beta: fine.beta,
        }
    }

    /// Relative amount by which λ_{1,β} ≥ p₁ + βη₁ fails (≤ 0 when it holds).
    pub fn splitting_defect(&self) -> f64 {
        let bound = self.p1 + self.beta * self.eta1;
        (bound - self.lambda) / self.lambda.abs().max(bound.abs()).max(1e-10)
    }
}

/// Curvature hypotheses shared by the eigenvalue audits.
#[derive(Clone, Debug)]
pub struct EigenHypotheses {
    pub constants: HypothesisConstants,
    /// min (λ_min + uncertainty) of R̂ic^V_{φ,m}.
    pub hat_ric_min: f64,
    /// min V·(λ_min + uncertainty) of R̂ic^V_{φ,m}.
    pub v_hat_ric_min: f64,
    pub tolerance: f64,
}

impl EigenHypotheses {
    pub fn compute(m: &ChartManifold, mdim: Mdim) -> Result<Self> {
        mdim.validate(m.dim(), m.phi_is_constant())?;
        let bg = boundary_geometry(m)?;
        let hat = resolved_hat_ric_min(m, mdim)?;
        let v = m.v().values();
        Ok(Self {
            constants: hypothesis_constants(&bg),
            hat_ric_min: hat.witness(|_| 1.0).0,
            v_hat_ric_min: hat.witness(|k| v[k]).0,
            tolerance: hat.tolerance(),
        })
    }

    /// Smallest K ≥ 0 with V·R̂ic^V_{φ,m} ≥ −(m−1)K g, if one exists.
    pub fn smallest_admissible_k(&self, mdim: Mdim) -> Option<f64> {
        let need = (-self.v_hat_ric_min - self.tolerance).max(0.0);
        match mdim {
            _ if need == 0.0 => Some(0.0),
            Mdim::Finite(m) if m > 1.0 => Some(need / (m - 1.0)),
            Mdim::Infinite => Some(f64::MIN_POSITIVE),
            _ => None,
        }
    }
}

/// (m−1)K, with the m = ∞ limit taken at fixed K.
fn curvature_shift(mdim: Mdim, k: f64) -> f64 {
    match mdim {
        Mdim::Finite(m) => (m - 1.0) * k,
        Mdim::Infinite if k == 0.0 => 0.0,
        Mdim::Infinite => f64::INFINITY,
    }
}

/// The four eigenvalue bounds for given spectral values and hypotheses:
/// η₁ ≥ c₁c₂; the upper bound on λ_{1,β}; p₁ > c₁η₁/(2η₁ + (m−1)K); the
/// lower bound on λ_{1,β}.
pub fn eigen_bound_reports(values: &SpectralValues, hyp: &EigenHypotheses, mdim: Mdim, k: f64) -> Result<Vec<AuditReport>> {
    let HypothesisConstants { c1, c2, .. } = hyp.constants;
    let SpectralValues { eta1, p1, lambda, beta } = *values;
    let shift = curvature_shift(mdim, k);
    let c1h = Hypothesis::positive("c1_positive", c1);
    let c2h = Hypothesis::positive("c2_positive", c2);
    let ric = Hypothesis::nonnegative("hat_ric_v_nonnegative", hyp.hat_ric_min, hyp.tolerance);
    let lower = Hypothesis::nonnegative("v_hat_ric_v_bounded_below", hyp.v_hat_ric_min + shift, hyp.tolerance);
    let admissible = hyp.smallest_admissible_k(mdim).unwrap_or(f64::NAN);

    let eta_bound =
        AuditReport::new("eta1-lower", eta1, c1 * c2, Relation::AtLeast, vec![ric.clone(), c1h.clone(), c2h.clone()], EIGEN_TOLERANCE);

    let a = 2.0 * eta1 + shift;
    let disc = a * a - 4.0 * c1 * c2 * eta1;
    if disc < -DISCRIMINANT_TOLERANCE * a * a {
        return Err(Error::NegativeDiscriminant { value: disc });
    }
    let upper_rhs = beta * eta1 + (a + disc.max(0.0).sqrt()) / (2.0 * c2);
    let upper = AuditReport::new(
        "wentzell-upper",
        lambda,
        upper_rhs,
        Relation::AtMost,
        vec![lower.clone(), c1h.clone(), c2h.clone()],
        EIGEN_TOLERANCE,
    )
    .with_diagnostic("discriminant", disc)
    .with_diagnostic("smallest_admissible_k", admissible);

    let steklov = AuditReport::new(
        "steklov-lower",
        p1,
        c1 * eta1 / a,
        Relation::Greater,
        vec![lower, c1h.clone(), c2h.clone()],
        EIGEN_TOLERANCE,
    )
    .with_diagnostic("smallest_admissible_k", admissible);

    let bc = beta * c2;
    let lower_rhs = 0.5 * c1 * (1.0 + bc + (bc * bc + 2.0 * bc).max(0.0).sqrt());
    let wentzell_lower =
        AuditReport::new("wentzell-lower", lambda, lower_rhs, Relation::AtLeast, vec![ric, c1h, c2h], EIGEN_TOLERANCE);
    Ok(vec![eta_bound, upper, steklov, wentzell_lower])
}

/// The eigenvalue audits with eigenvalues of `m` itself.
pub fn audit_eigen_bounds(m: &ChartManifold, mdim: Mdim, k: f64, beta: f64) -> Result<Vec<AuditReport>> {
    check_k(k)?;
    let hyp = EigenHypotheses::compute(m, mdim)?;
    let values = SpectralValues::compute(m, beta)?;
    eigen_bound_reports(&values, &hyp, mdim, k)
}

/// The eigenvalue audits with eigenvalues extrapolated from `coarse` and
/// its refinement `fine`; hypotheses are checked on `fine`.
pub fn audit_eigen_bounds_refined(
    coarse: &ChartManifold,
    fine: &ChartManifold,
    mdim: Mdim,
    k: f64,
    beta: f64,
) -> Result<(Vec<AuditReport>, SpectralValues, SpectralValues)> {
    check_k(k)?;
    let hyp = EigenHypotheses::compute(fine, mdim)?;
    let (c, f) = rayon::join(|| SpectralValues::compute(coarse, beta), || SpectralValues::compute(fine, beta));
    let (c, f) = (c?, f?);
    let values = SpectralValues::extrapolate(&c, &f);
    Ok((eigen_bound_reports(&values, &hyp, mdim, k)?, values, f))
}

fn check_k(k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("K must be a finite nonnegative constant, got {k}")))
    }
}
