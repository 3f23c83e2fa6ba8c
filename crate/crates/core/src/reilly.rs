//! Term-by-term evaluation of the weighted Reilly identity and of the
//! m-dimensional inequality derived from it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::boundary::{boundary_geometry, boundary_operators, BoundaryGeometry};
use crate::calculus::{christoffel_and_curvature, equality_residuals_lenient, norm_sq, Differential, EqualityResiduals, Mdim};
use crate::chart::{ChartManifold, ScalarField};
use crate::error::{Error, Result};
use crate::integrate::{convergence_order, integrate_boundary, integrate_weighted_volume, ConvergenceEstimate, RefinementSeries};
use crate::tensor::TensorField;

/// The six integrals of the identity; their sum vanishes for exact data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReillyBreakdown {
    /// ∫_{∂M} −V II^V(V∇̄u, V∇̄u) dσ with u = f/V.
    pub b_ii: f64,
    /// ∫_{∂M} −V³ H_φ (u_ν)² dσ.
    pub b_h: f64,
    /// ∫_{∂M} −2V² u_ν (Δ̄_φ f − (Δ̄_φ V/V) f) dσ.
    pub b_cross: f64,
    /// ∫_M V (Δ_φ f − (Δ_φ V/V) f)² dμ.
    pub i_sq: f64,
    /// −∫_M V |∇²f − (f/V)∇²V|² dμ.
    pub i_a: f64,
    /// −∫_M V R̂ic^V_{φ,∞}(V∇u, V∇u) dμ.
    pub i_ric: f64,
    /// Sum of the six terms.
    pub residual: f64,
    /// Largest |term|.
    pub scale: f64,
    /// Largest grid spacing.
    pub h: f64,
}

/// Tolerance constant of the residual acceptance rule.
pub const RESIDUAL_CONSTANT: f64 = 10.0;

impl ReillyBreakdown {
    fn from_terms(t: [f64; 6], h: f64) -> Self {
        let residual = t.iter().sum();
        let scale = t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Self { b_ii: t[0], b_h: t[1], b_cross: t[2], i_sq: t[3], i_a: t[4], i_ric: t[5], residual, scale, h }
    }

    pub fn terms(&self) -> [f64; 6] {
        [self.b_ii, self.b_h, self.b_cross, self.i_sq, self.i_a, self.i_ric]
    }

    /// |residual| / scale, zero when every term vanishes.
    pub fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.residual.abs() / self.scale
        }
    }

    /// Whether |residual| ≤ C·scale·h^1.5.
    pub fn within_tolerance(&self) -> bool {
        self.residual.abs() <= RESIDUAL_CONSTANT * self.scale * self.h.powf(1.5)
    }
}

/// Pointwise ingredients shared by the identity and the inequality.
struct Ingredients {
    bg: Option<BoundaryGeometry>,
    boundary: [f64; 3],
    /// V (Δ_φ f − (Δ_φ V/V) f)².
    sq: Vec<f64>,
    /// V |A|².
    a_sq: Vec<f64>,
    /// V∇u as covector components.
    w: Vec<Vec<f64>>,
}

fn quadratic_form(t: &DMatrix<f64>, ginv: &DMatrix<f64>, w: &[f64]) -> f64 {
    let up = ginv * DVector::from_column_slice(w);
    (t * &up).dot(&up)
}

fn ingredients(m: &ChartManifold, dif: &Differential, f: &ScalarField) -> Result<Ingredients> {
    if m.domain().has_corners() {
        return Err(Error::CornerBoundary);
    }
    let n = m.dim();
    let ta = dif.traceless_a(f)?;
    let v = m.v().values();
    let ginv = m.metric().inverse();
    let lf: Vec<f64> = (0..m.len())
        .map(|k| ta.hf.lap_phi.value(k) - ta.hv.lap_phi.value(k) / v[k] * f.value(k))
        .collect();
    let sq = (0..m.len()).map(|k| v[k] * lf[k] * lf[k]).collect();
    let a_sq = (0..m.len())
        .into_par_iter()
        .map(|k| v[k] * norm_sq(&ta.a.matrix_at(k), &ginv.matrix_at(k)))
        .collect();
    let w: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..m.len()).map(|k| ta.hf.grad[i][k] - f.value(k) / v[k] * ta.hv.grad[i][k]).collect())
        .collect();

    let (bg, boundary) = if m.domain().has_boundary() {
        let bg = boundary_geometry(m)?;
        let terms = boundary_terms(m, &bg, f, &w)?;
        (Some(bg), terms)
    } else {
        (None, [0.0; 3])
    };
    Ok(Ingredients { bg, boundary, sq, a_sq, w })
}

fn boundary_terms(m: &ChartManifold, bg: &BoundaryGeometry, f: &ScalarField, w: &[Vec<f64>]) -> Result<[f64; 3]> {
    let v_all = m.v().values();
    let u = ScalarField::from_values((0..m.len()).map(|k| f.value(k) / v_all[k]).collect());
    let ops_f = boundary_operators(bg, f)?;
    let ops_v = boundary_operators(bg, m.v())?;
    let ops_u = boundary_operators(bg, &u)?;
    // V u_ν is the normal component of V∇u.
    let vu_nu = bg.normal_component(w);
    let mut parts = [Vec::new(), Vec::new(), Vec::new()];
    for (fi, face) in bg.faces.iter().enumerate() {
        let v = face.chart.v().values();
        let gb = face.chart.metric();
        let k = face.len();
        let d = face.chart.dim();
        let mut b_ii = vec![0.0; k];
        let mut b_h = vec![0.0; k];
        let mut b_cross = vec![0.0; k];
        for j in 0..k {
            let node = face.nodes[j];
            let grad_u: Vec<f64> = (0..d).map(|a| v[j] * ops_u[fi].grad_bar[a][j]).collect();
            b_ii[j] = -v[j] * quadratic_form(&face.ii_v.matrix_at(j), &gb.inverse_at(j), &grad_u);
            let u_nu = vu_nu[fi][j] / v[j];
            b_h[j] = -v[j].powi(3) * face.h_phi[j] * u_nu * u_nu;
            let tang = ops_f[fi].lap_phi_bar[j] - ops_v[fi].lap_phi_bar[j] / v[j] * f.value(node);
            b_cross[j] = -2.0 * v[j] * v[j] * u_nu * tang;
        }
        parts[0].push(b_ii);
        parts[1].push(b_h);
        parts[2].push(b_cross);
    }
    Ok([
        integrate_boundary(bg, &parts[0]),
        integrate_boundary(bg, &parts[1]),
        integrate_boundary(bg, &parts[2]),
    ])
}

fn ricci_term(m: &ChartManifold, t: &TensorField, w: &[Vec<f64>]) -> f64 {
    let v = m.v().values();
    let ginv = m.metric().inverse();
    let n = m.dim();
    let integrand: Vec<f64> = (0..m.len())
        .into_par_iter()
        .map(|k| {
            let wk: Vec<f64> = (0..n).map(|i| w[i][k]).collect();
            v[k] * quadratic_form(&t.matrix_at(k), &ginv.matrix_at(k), &wk)
        })
        .collect();
    integrate_weighted_volume(m, &integrand)
}

/// All six terms of the identity for one function f. On a closed manifold
/// the boundary terms are zero.
pub fn reilly_term_breakdown(m: &ChartManifold, f: &ScalarField) -> Result<ReillyBreakdown> {
    let (gamma, ric) = christoffel_and_curvature(m)?;
    let dif = Differential::with_gamma(m, gamma)?;
    let ing = ingredients(m, &dif, f)?;
    let hat = dif.hat_ric_v(&ric, Mdim::Infinite)?;
    let i_sq = integrate_weighted_volume(m, &ing.sq);
    let i_a = -integrate_weighted_volume(m, &ing.a_sq);
    let i_ric = -ricci_term(m, &hat, &ing.w);
    let [b_ii, b_h, b_cross] = ing.boundary;
    Ok(ReillyBreakdown::from_terms([b_ii, b_h, b_cross, i_sq, i_a, i_ric], m.domain().max_spacing()))
}

/// Right-hand side of the m-dimensional inequality and the two equality residuals.
#[derive(Clone, Debug)]
pub struct CorollaryGap {
    pub gap: f64,
    /// Sum of the three boundary integrals.
    pub boundary: f64,
    /// ∫ V ((m−1)/m)(Δ_φ f − (Δ_φ V/V) f)² dμ.
    pub interior_sq: f64,
    /// −∫ V R̂ic^V_{φ,m}(V∇u, V∇u) dμ.
    pub interior_ric: f64,
    pub residuals: EqualityResiduals,
}

/// Evaluate the inequality 0 ≤ boundary terms + ∫ V[((m−1)/m)(Lf)² − R̂ic^V_{φ,m}(V∇u, V∇u)] dμ.
pub fn corollary_gap(m: &ChartManifold, f: &ScalarField, mdim: Mdim) -> Result<CorollaryGap> {
    mdim.validate(m.dim(), m.phi_is_constant())?;
    let (gamma, ric) = christoffel_and_curvature(m)?;
    let dif = Differential::with_gamma(m, gamma)?;
    let ing = ingredients(m, &dif, f)?;
    let hat = dif.hat_ric_v(&ric, mdim)?;
    let factor = match mdim {
        Mdim::Finite(md) => (md - 1.0) / md,
        Mdim::Infinite => 1.0,
    };
    let interior_sq = factor * integrate_weighted_volume(m, &ing.sq);
    let interior_ric = -ricci_term(m, &hat, &ing.w);
    let boundary: f64 = ing.boundary.iter().sum();
    let residuals = equality_residuals_lenient(m, f, mdim)?;
    drop(ing.bg);
    Ok(CorollaryGap { gap: boundary + interior_sq + interior_ric, boundary, interior_sq, interior_ric, residuals })
}

/// Identity residuals over a sequence of refinements and their observed order.
#[derive(Clone, Debug)]
pub struct ReillyStudy {
    pub levels: Vec<ReillyBreakdown>,
    /// Order of |residual|/scale against h; `None` with fewer than three levels.
    pub order: Option<ConvergenceEstimate>,
}

impl ReillyStudy {
    pub fn finest(&self) -> Option<&ReillyBreakdown> {
        self.levels.last()
    }
}

/// Run the identity on every manifold of a refinement sequence (coarse to fine).
pub fn reilly_refinement<F>(levels: usize, build: F) -> Result<ReillyStudy>
where
    F: Fn(usize) -> Result<(ChartManifold, ScalarField)> + Sync,
{
    let levels: Vec<ReillyBreakdown> = (0..levels)
        .into_par_iter()
        .map(|level| {
            let (m, f) = build(level)?;
            reilly_term_breakdown(&m, &f)
        })
        .collect::<Result<_>>()?;
    let order = if levels.len() >= 3 {
        let mut series = RefinementSeries::new();
        for b in &levels {
            series.push(b.h, b.relative_residual())?;
        }
        Some(convergence_order(&series, None)?)
    } else {
        None
    };
    Ok(ReillyStudy { levels, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::catalog::Geometry;
    use crate::chart::scalar_fn;

    #[test]
    fn f_equal_to_v_gives_zero_terms() {
        let m = Geometry::FlatDisk
            .standard(1)
            .unwrap()
            .with_weights(scalar_fn(|p| 0.1 * p[0] * p[0]), scalar_fn(|p| 1.0 + 0.2 * p[0] * p[0]))
            .unwrap();
        let b = reilly_term_breakdown(&m, m.v()).unwrap();
        assert!(b.terms().iter().all(|t| t.abs() < 1e-10), "{b:?}");
        let gap = corollary_gap(&m, m.v(), Mdim::Finite(4.0)).unwrap();
        assert!(gap.gap.abs() < 1e-10);
        assert!(gap.residuals.traceless_max < 1e-8 && gap.residuals.trace_max.unwrap() < 1e-8);
    }

    #[test]
    fn disk_identity_converges() {
        let geo = Geometry::FlatDisk;
        let study = reilly_refinement(3, |level| {
            let m = geo.standard(level)?;
            let f = m.sample(geo.cartesian_fn(1.0, |x| x[0] * x[0] + x[1]))?;
            Ok((m, f))
        })
        .unwrap();
        let fine = study.finest().unwrap();
        assert!(fine.relative_residual() < 1e-3, "{fine:?}");
        assert!(study.order.unwrap().order > 1.8, "{:?}", study.order);
    }

    #[test]
    fn closed_sphere_has_no_boundary_terms() {
        let geo = Geometry::RoundSphere2;
        let m = geo.standard(2).unwrap();
        let f = m.sample(geo.cartesian_fn(1.0, |x| x[0] * x[2] + x[1])).unwrap();
        let b = reilly_term_breakdown(&m, &f).unwrap();
        assert_eq!((b.b_ii, b.b_h, b.b_cross), (0.0, 0.0, 0.0));
        assert!(b.relative_residual() < 1e-2, "{b:?}");
    }

    #[test]
    fn disk_gap_is_nonnegative() {
        let geo = Geometry::FlatDisk;
        let m = geo.standard(2).unwrap();
        let f = m.sample(geo.cartesian_fn(1.0, |x| x[0])).unwrap();
        let g = corollary_gap(&m, &f, Mdim::Finite(2.0)).unwrap();
        let b = reilly_term_breakdown(&m, &f).unwrap();
        assert!(g.gap >= -1e-6 * b.scale.max(1.0), "{g:?}");
    }
}
