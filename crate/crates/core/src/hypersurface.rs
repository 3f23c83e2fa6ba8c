//! Closed hypersurfaces of space forms, symmetric functions of curvature
//! operators (Newton transformations, Schouten tensor) and the almost-Schur
//! audits.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::audits::{schur_constant, AuditReport, Hypothesis, Relation, INTEGRAL_TOLERANCE};
use crate::calculus::differentiate;
use crate::calculus::{
    christoffel_and_curvature, generalized_eigenvalues, gradient_components, norm_sq, resolved_hat_ric_min,
    scalar_curvature, trace, Differential, Mdim,
};
use crate::chart::catalog::Geometry;
use crate::chart::{ChartManifold, ParamDomain, ScalarField};
use crate::error::{Error, Result};
use crate::integrate::integrate_weighted_volume;
use crate::spectral::eigen_closed;
use crate::tensor::{pair_count, pair_index, TensorField};

/// Parametrization of a hypersurface in the ambient model space.
pub type EmbeddingFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

pub fn embedding_fn<F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static>(f: F) -> EmbeddingFn {
    Arc::new(f)
}

/// The ambient space form R^{n+1}(c) with its linear model: Euclidean space
/// (c = 0), the unit sphere in R^{n+2} (c = 1) or the hyperboloid
/// ⟨x, x⟩ = −1, x₀ > 0 in Minkowski space R^{1,n+1} (c = −1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceForm {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl SpaceForm {
    pub fn from_curvature(c: i32) -> Result<Self> {
        match c {
            -1 => Ok(SpaceForm::Hyperbolic),
            0 => Ok(SpaceForm::Euclidean),
            1 => Ok(SpaceForm::Spherical),
            _ => Err(Error::Input(format!("space-form curvature must be -1, 0 or 1, got {c}"))),
        }
    }

    pub fn curvature(&self) -> i32 {
        match self {
            SpaceForm::Hyperbolic => -1,
            SpaceForm::Euclidean => 0,
            SpaceForm::Spherical => 1,
        }
    }

    /// Dimension of the linear model containing a hypersurface of dimension n.
    pub fn ambient_dim(&self, n: usize) -> usize {
        match self {
            SpaceForm::Euclidean => n + 1,
            _ => n + 2,
        }
    }

    /// Inner product of the linear model.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        match self {
            SpaceForm::Hyperbolic => s - 2.0 * a[0] * b[0],
            _ => s,
        }
    }

    /// Distance of a point from the model: |⟨x, x⟩ − c| (0 in the Euclidean case).
    pub fn model_defect(&self, x: &[f64]) -> f64 {
        match self {
            SpaceForm::Euclidean => 0.0,
            SpaceForm::Spherical => (self.inner(x, x) - 1.0).abs(),
            SpaceForm::Hyperbolic => (self.inner(x, x) + 1.0).abs() + if x[0] > 0.0 { 0.0 } else { 1.0 },
        }
    }
}

/// A closed hypersurface sampled on a closed chart, with its induced geometry.
#[derive(Clone, Debug)]
pub struct EmbeddedHypersurface {
    pub space_form: SpaceForm,
    /// Ambient position of every node.
    pub position: Vec<Vec<f64>>,
    /// Unit normal of every node, oriented so that ∫H dv ≥ 0.
    pub normal: Vec<Vec<f64>>,
    /// The chart with the induced metric, φ = 0 and V = 1.
    pub manifold: ChartManifold,
    /// h_ij = ⟨∂_i∂_j X, N⟩.
    pub second_fundamental_form: TensorField,
    /// Eigenvalues of the shape operator, ascending, per node.
    pub principal_curvatures: Vec<Vec<f64>>,
    /// H = κ₁ + … + κₙ.
    pub mean_curvature: ScalarField,
    /// max |⟨X, X⟩ − c| over the nodes.
    pub model_defect: f64,
    /// max |∂_i∂_j X − ∂_j∂_i X| over the nodes (mixed derivatives in both orders).
    pub symmetry_defect: f64,
}

/// Generalized cross product: the covector N_a = det(e_a; rows).
fn cross(rows: &[Vec<f64>]) -> Vec<f64> {
    let dim = rows.len() + 1;
    (0..dim)
        .map(|a| {
            let minor = DMatrix::from_fn(rows.len(), rows.len(), |r, c| rows[r][if c < a { c } else { c + 1 }]);
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect()
}

/// Sample X on a closed chart and compute the induced metric, normal, second
/// fundamental form and principal curvatures with stencils of order `order`.
pub fn embed_and_curvatures(
    domain: &ParamDomain,
    x: &EmbeddingFn,
    form: SpaceForm,
    order: usize,
) -> Result<EmbeddedHypersurface> {
    if !domain.is_closed() {
        return Err(Error::NotClosed);
    }
    let n = domain.dim();
    let big = form.ambient_dim(n);
    let len = domain.len();
    let position: Vec<Vec<f64>> = (0..len).into_par_iter().map(|k| x(&domain.point(k))).collect();
    if let Some(node) = position.iter().position(|p| p.len() != big || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::Input(format!(
            "embedding must return {big} finite coordinates (node {node} returned {})",
            position[node].len()
        )));
    }
    let comp: Vec<Vec<f64>> = (0..big).map(|a| position.iter().map(|p| p[a]).collect()).collect();
    let d1: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| comp.iter().map(|c| differentiate(domain, c, 0, i, 1, order)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut d2 = vec![Vec::new(); pair_count(n)];
    let mut symmetry_defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            d2[pair_index(n, i, j)] = if i == j {
                comp.iter().map(|c| differentiate(domain, c, 0, i, 2, order)).collect::<Result<Vec<_>>>()?
            } else {
                let ij: Vec<Vec<f64>> =
                    d1[j].iter().map(|c| differentiate(domain, c, 1 << j, i, 1, order)).collect::<Result<_>>()?;
                let ji: Vec<Vec<f64>> =
                    d1[i].iter().map(|c| differentiate(domain, c, 1 << i, j, 1, order)).collect::<Result<_>>()?;
                for (a, b) in ij.iter().zip(&ji) {
                    for (p, q) in a.iter().zip(b) {
                        symmetry_defect = symmetry_defect.max((p - q).abs());
                    }
                }
                ij.iter().zip(&ji).map(|(a, b)| a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect()).collect()
            };
        }
    }
    let tangent = |node: usize, i: usize| -> Vec<f64> { (0..big).map(|a| d1[i][a][node]).collect() };
    let g = TensorField::symmetric_from_fn(n, len, |node| {
        let t: Vec<Vec<f64>> = (0..n).map(|i| tangent(node, i)).collect();
        DMatrix::from_fn(n, n, |i, j| form.inner(&t[i], &t[j]))
    });
    let mut normal: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|node| {
            let mut rows: Vec<Vec<f64>> = (0..n).map(|i| tangent(node, i)).collect();
            if form != SpaceForm::Euclidean {
                rows.push(position[node].clone());
            }
            let mut nv = cross(&rows);
            if form == SpaceForm::Hyperbolic {
                nv[0] = -nv[0];
            }
            let norm = form.inner(&nv, &nv);
            if !(norm > 0.0) {
                return Vec::new();
            }
            nv.iter().map(|v| v / norm.sqrt()).collect()
        })
        .collect();
    if let Some(node) = normal.iter().position(Vec::is_empty) {
        return Err(Error::DegenerateImmersion { node });
    }
    let mut h = TensorField::symmetric_from_fn(n, len, |node| {
        DMatrix::from_fn(n, n, |i, j| {
            let xij: Vec<f64> = (0..big).map(|a| d2[pair_index(n, i, j)][a][node]).collect();
            form.inner(&xij, &normal[node])
        })
    });
    let manifold = ChartManifold::from_samples(
        domain.clone(),
        g,
        ScalarField::constant(domain, 0.0),
        ScalarField::constant(domain, 1.0),
    )
    .map_err(|e| match e {
        Error::DegenerateMetric { node } => Error::DegenerateImmersion { node },
        other => other,
    })?
    .with_stencil_order(order);
    let gm = manifold.metric();
    let mean: Vec<f64> = (0..len).map(|k| trace(&h.matrix_at(k), &gm.inverse().matrix_at(k))).collect();
    if integrate_weighted_volume(&manifold, &mean) < 0.0 {
        for comp in 0..pair_count(n) {
            let (i, j) = unpair(n, comp);
            h.component_mut(&[i, j]).iter_mut().for_each(|v| *v = -*v);
        }
        normal.iter_mut().for_each(|nv| nv.iter_mut().for_each(|v| *v = -*v));
    }
    let principal_curvatures: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|k| generalized_eigenvalues(&h.matrix_at(k), &gm.g().matrix_at(k)))
        .collect();
    let mean_curvature = ScalarField::from_values(principal_curvatures.iter().map(|k| k.iter().sum()).collect());
    let model_defect = position.iter().map(|p| form.model_defect(p)).fold(0.0, f64::max);
    Ok(EmbeddedHypersurface {
        space_form: form,
        position,
        normal,
        manifold,
        second_fundamental_form: h,
        principal_curvatures,
        mean_curvature,
        model_defect,
        symmetry_defect,
    })
}

fn unpair(n: usize, comp: usize) -> (usize, usize) {
    for i in 0..n {
        for j in i..n {
            if pair_index(n, i, j) == comp {
                return (i, j);
            }
        }
    }
    unreachable!("component index out of range")
}

/// Root mean square of the g-norm of a covector field over the manifold.
fn rms_covector(m: &ChartManifold, w: &[Vec<f64>]) -> f64 {
    let ginv = m.metric().inverse();
    let n = m.dim();
    let sq: Vec<f64> = (0..m.len())
        .map(|k| {
            let gi = ginv.matrix_at(k);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += gi[(i, j)] * w[i][k] * w[j][k];
                }
            }
            s
        })
        .collect();
    let ones = vec![1.0; m.len()];
    (integrate_weighted_volume(m, &sq) / integrate_weighted_volume(m, &ones)).sqrt()
}

impl EmbeddedHypersurface {
    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// The induced chart with a potential V and weight φ sampled from
    /// evaluators on the chart coordinates.
    pub fn with_weights(&self, phi: crate::chart::ScalarFn, v: crate::chart::ScalarFn) -> Result<ChartManifold> {
        self.manifold.with_weights(phi, v)
    }

    /// Root-mean-square g-norm of the Codazzi defect h_ij,j − H_i.
    pub fn codazzi_defect(&self) -> Result<f64> {
        let m = &self.manifold;
        let div = Differential::new(m)?.divergence(&self.second_fundamental_form)?;
        let dh = gradient_components(m, &self.mean_curvature)?;
        let w: Vec<Vec<f64>> = div.iter().zip(&dh).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        Ok(rms_covector(m, &w))
    }
}

/// e₀ … eₙ of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &x) in values.iter().enumerate() {
        for r in (1..=k + 1).rev() {
            e[r] += x * e[r - 1];
        }
    }
    e
}

/// P₀ = I, P_r = S_r I − B P_{r−1} for r = 1..=n.
pub fn newton_recursion(b: &DMatrix<f64>, s: &[f64]) -> Vec<DMatrix<f64>> {
    let n = b.nrows();
    let mut p = vec![DMatrix::identity(n, n)];
    for r in 1..=n {
        let next = DMatrix::identity(n, n) * s[r] - b * &p[r - 1];
        p.push(next);
    }
    p
}

/// S_r = e_r(eigenvalues of B) and the Newton transformations of a symmetric matrix.
pub fn newton_tensors(b: &DMatrix<f64>) -> (Vec<f64>, Vec<DMatrix<f64>>) {
    let sym = (b + b.transpose()) * 0.5;
    let eig: Vec<f64> = sym.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    let s = elementary_symmetric(&eig);
    let p = newton_recursion(&sym, &s);
    (s, p)
}

/// Symmetric functions of a symmetric tensor B relative to g: S_r = e_r of
/// the g-eigenvalues and the covariant Newton tensors P_r, r = 0..=n.
#[derive(Clone, Debug)]
pub struct SymmetricFunctions {
    pub base: TensorField,
    pub s: Vec<ScalarField>,
    pub p: Vec<TensorField>,
    /// max |tr P_r − (n − r) S_r| over r and the nodes.
    pub trace_defect: f64,
}

impl SymmetricFunctions {
    /// Root-mean-square g-norm of div P_r for r = 0..=n.
    pub fn divergence_defects(&self, m: &ChartManifold) -> Result<Vec<f64>> {
        let d = Differential::new(m)?;
        self.p.iter().map(|p| Ok(rms_covector(m, &d.divergence(p)?))).collect()
    }
}

/// S_r and P_r of a symmetric (0,2) tensor field on a chart manifold.
pub fn newton_family(m: &ChartManifold, base: &TensorField) -> SymmetricFunctions {
    let n = m.dim();
    let len = m.len();
    let g = m.metric().g();
    let ginv = m.metric().inverse();
    let per: Vec<(Vec<f64>, Vec<DMatrix<f64>>)> = (0..len)
        .into_par_iter()
        .map(|k| {
            let chol = g.matrix_at(k).cholesky().expect("metric is positive definite");
            let l = chol.l();
            let li = l.clone().try_inverse().expect("Cholesky factor is invertible");
            let b = &li * base.matrix_at(k) * li.transpose();
            let (s, p) = newton_tensors(&b);
            (s, p.into_iter().map(|q| &l * q * l.transpose()).collect())
        })
        .collect();
    let s: Vec<ScalarField> = (0..=n).map(|r| ScalarField::from_values(per.iter().map(|x| x.0[r]).collect())).collect();
    let p: Vec<TensorField> =
        (0..=n).map(|r| TensorField::symmetric_from_fn(n, len, |k| per[k].1[r].clone())).collect();
    let trace_defect = (0..=n)
        .flat_map(|r| {
            let p = &p;
            let s = &s;
            (0..len).map(move |k| (trace(&p[r].matrix_at(k), &ginv.matrix_at(k)) - (n - r) as f64 * s[r].value(k)).abs())
        })
        .fold(0.0, f64::max);
    SymmetricFunctions { base: base.clone(), s, p, trace_defect }
}

/// S_r and P_r of the shape operator.
pub fn newton_transforms(hs: &EmbeddedHypersurface) -> SymmetricFunctions {
    newton_family(&hs.manifold, &hs.second_fundamental_form)
}

/// The Schouten tensor A = (Ric − R g/(2(n−1)))/(n−2) with σ_k = S_k(A)
/// and T^{(k)} = P_k(A).
pub fn schouten_and_tk(m: &ChartManifold) -> Result<SymmetricFunctions> {
    let n = m.dim();
    if n < 3 {
        return Err(Error::DimensionTooLow { n, min: 3 });
    }
    if !m.domain().is_closed() {
        return Err(Error::NotClosed);
    }
    let (_, ric) = christoffel_and_curvature(m)?;
    let r = scalar_curvature(m, &ric);
    let g = m.metric().g();
    let nf = n as f64;
    let a = TensorField::symmetric_from_fn(n, m.len(), |k| {
        (ric.matrix_at(k) - g.matrix_at(k) * (r.value(k) / (2.0 * (nf - 1.0)))) / (nf - 2.0)
    });
    Ok(newton_family(m, &a))
}

/// The tensor of an almost-Schur audit.
#[derive(Clone, Debug)]
pub enum SchurTarget {
    /// T = II with div II = ∇H (drift 1).
    MeanCurvature,
    /// T = P_r with div P_r = 0 (drift 0).
    Newton(usize),
    /// T = Ric with div Ric = ∇R/2 (drift 1/2).
    ScalarCurvature,
    /// T = T^{(k)} of the Schouten tensor, divergence free on locally
    /// conformally flat manifolds (drift 0); the flag is asserted by the caller.
    Schouten { k: usize, conformally_flat: bool },
    /// Any symmetric T with div T = c ∇ tr T.
    Tensor { tensor: TensorField, drift: f64 },
}

impl SchurTarget {
    pub fn drift(&self) -> f64 {
        match self {
            SchurTarget::MeanCurvature => 1.0,
            SchurTarget::ScalarCurvature => 0.5,
            SchurTarget::Newton(_) | SchurTarget::Schouten { .. } => 0.0,
            SchurTarget::Tensor { drift, .. } => *drift,
        }
    }

    pub fn name(&self) -> String {
        match self {
            SchurTarget::MeanCurvature => "almost-schur-h".into(),
            SchurTarget::Newton(r) => format!("almost-schur-s{r}"),
            SchurTarget::ScalarCurvature => "almost-schur-r".into(),
            SchurTarget::Schouten { k, .. } => format!("almost-schur-sigma{k}"),
            SchurTarget::Tensor { .. } => "almost-schur-tensor".into(),
        }
    }

    /// The tensor T on `m`; hypersurface targets need the second fundamental form.
    pub fn tensor(&self, m: &ChartManifold, shape: Option<&TensorField>) -> Result<TensorField> {
        let n = m.dim();
        let need_shape = || shape.cloned().ok_or_else(|| Error::InvalidTarget("target needs a hypersurface".into()));
        match self {
            SchurTarget::MeanCurvature => need_shape(),
            SchurTarget::Newton(r) => {
                if *r == 0 || *r > n {
                    return Err(Error::InvalidTarget(format!("S_r needs 1 <= r <= {n}, got {r}")));
                }
                Ok(newton_family(m, &need_shape()?).p[*r].clone())
            }
            SchurTarget::ScalarCurvature => Ok(christoffel_and_curvature(m)?.1),
            SchurTarget::Schouten { k, .. } => {
                if *k == 0 || *k > n {
                    return Err(Error::InvalidTarget(format!("sigma_k needs 1 <= k <= {n}, got {k}")));
                }
                Ok(schouten_and_tk(m)?.p[*k].clone())
            }
            SchurTarget::Tensor { tensor, .. } => {
                if tensor.dim() != n || tensor.len() != m.len() || tensor.valence() != (0, 2) || !tensor.is_symmetric() {
                    return Err(Error::InvalidTarget("tensor must be a symmetric (0,2) field on the chart".into()));
                }
                Ok(tensor.clone())
            }
        }
    }
}

/// ((nc − 1)²/n²) ∫V (trT − avg)² dμ ≤ C ∫V |T − (trT/n) g|² dμ with
/// C = C_{n,K₁,K₂,η₁}, avg = ∫V trT dμ / ∫V dμ and K₂ = max V|∇φ|², under
/// V R̂ic^V_{φ,∞} ≥ −(n−1)K₁. `k1 = None` selects the smallest admissible K₁.
/// Diagnostics: eta1, k1, k2, C and the drift c.
pub fn audit_almost_schur(
    m: &ChartManifold,
    target: &SchurTarget,
    shape: Option<&TensorField>,
    k1: Option<f64>,
) -> Result<AuditReport> {
    if !m.domain().is_closed() {
        return Err(Error::NotClosed);
    }
    let n = m.dim();
    let nf = n as f64;
    let t = target.tensor(m, shape)?;
    let c = target.drift();
    let (eig, hat) = rayon::join(|| eigen_closed(m), || resolved_hat_ric_min(m, Mdim::Infinite));
    let (eta1, hat) = (eig?.eigenvalue, hat?);
    let v = m.v().values();
    let (w, _) = hat.witness(|k| v[k]);
    let tol = hat.tolerance();
    let k1 = match k1 {
        Some(k) if k >= 0.0 && k.is_finite() => k,
        Some(k) => return Err(Error::Input(format!("K1 must be a finite nonnegative constant, got {k}"))),
        None => (-(w + tol)).max(0.0) / (nf - 1.0),
    };
    let grad = gradient_components(m, m.phi())?;
    let ginv = m.metric().inverse();
    let k2 = (0..m.len())
        .map(|k| {
            let gi = ginv.matrix_at(k);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += gi[(i, j)] * grad[i][k] * grad[j][k];
                }
            }
            v[k] * s
        })
        .fold(0.0, f64::max);
    let cst = schur_constant(n, k1, k2, eta1)?;
    let g = m.metric().g();
    let (tr, sq): (Vec<f64>, Vec<f64>) = (0..m.len())
        .into_par_iter()
        .map(|k| {
            let tm = t.matrix_at(k);
            let gi = ginv.matrix_at(k);
            let tr = trace(&tm, &gi);
            let ring = tm - g.matrix_at(k) * (tr / nf);
            (tr, norm_sq(&ring, &gi))
        })
        .unzip();
    let vol = integrate_weighted_volume(m, v);
    let vtr: Vec<f64> = tr.iter().zip(v).map(|(a, b)| a * b).collect();
    let avg = integrate_weighted_volume(m, &vtr) / vol;
    let dev: Vec<f64> = tr.iter().zip(v).map(|(a, b)| b * (a - avg).powi(2)).collect();
    let vsq: Vec<f64> = sq.iter().zip(v).map(|(a, b)| a * b).collect();
    let factor = (nf * c - 1.0).powi(2) / (nf * nf);
    let lhs = factor * integrate_weighted_volume(m, &dev);
    let rhs = cst * integrate_weighted_volume(m, &vsq);
    let trsq: Vec<f64> = tr.iter().zip(v).map(|(a, b)| b * a * a).collect();
    let scale = factor.max(cst) * integrate_weighted_volume(m, &trsq);
    let mut hypotheses = vec![Hypothesis::nonnegative("v_hat_ric_v_inf_bounded_below", w + (nf - 1.0) * k1, tol)];
    if let SchurTarget::Schouten { conformally_flat, .. } = target {
        hypotheses.push(Hypothesis::new(
            "locally_conformally_flat",
            *conformally_flat,
            if *conformally_flat { 1.0 } else { 0.0 },
        ));
    }
    Ok(AuditReport::with_scale(&target.name(), lhs, rhs, Relation::AtMost, hypotheses, INTEGRAL_TOLERANCE, scale)
        .with_diagnostic("eta1", eta1)
        .with_diagnostic("k1", k1)
        .with_diagnostic("k2", k2)
        .with_diagnostic("schur_constant", cst)
        .with_diagnostic("drift", c))
}

/// Closed hypersurfaces with closed-form reference curvatures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CatalogHypersurface {
    /// Round sphere of the given radius in R³.
    Sphere { radius: f64 },
    /// Ellipsoid x²/a² + y²/b² + z²/c² = 1 in R³.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Torus of revolution with tube radius `minor` around a circle of radius `major`.
    Torus { major: f64, minor: f64 },
    /// Geodesic sphere of the given radius in S³ (unit sphere model in R⁴).
    SphereInS3 { radius: f64 },
    /// Geodesic sphere of the given radius in H³ (hyperboloid model in R^{1,3}).
    SphereInH3 { radius: f64 },
}

impl CatalogHypersurface {
    pub fn space_form(&self) -> SpaceForm {
        match self {
            CatalogHypersurface::SphereInS3 { .. } => SpaceForm::Spherical,
            CatalogHypersurface::SphereInH3 { .. } => SpaceForm::Hyperbolic,
            _ => SpaceForm::Euclidean,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            CatalogHypersurface::Sphere { .. } => "sphere",
            CatalogHypersurface::Ellipsoid { .. } => "ellipsoid",
            CatalogHypersurface::Torus { .. } => "torus",
            CatalogHypersurface::SphereInS3 { .. } => "sphere-in-s3",
            CatalogHypersurface::SphereInH3 { .. } => "sphere-in-h3",
        }
    }

    /// Parameter domain at refinement level `level`.
    pub fn domain(&self, level: usize) -> Result<ParamDomain> {
        match self {
            CatalogHypersurface::Torus { .. } => {
                let k = 16 << level;
                Geometry::FlatTorus2.domain(&[k, k])
            }
            _ => Geometry::RoundSphere2.domain(&Geometry::RoundSphere2.resolution(level)),
        }
    }

    pub fn embedding(&self) -> EmbeddingFn {
        let ang = |p: &[f64]| (p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin(), p[0].cos());
        match *self {
            CatalogHypersurface::Sphere { radius } => embedding_fn(move |p| {
                let (x, y, z) = ang(p);
                vec![radius * x, radius * y, radius * z]
            }),
            CatalogHypersurface::Ellipsoid { a, b, c } => embedding_fn(move |p| {
                let (x, y, z) = ang(p);
                vec![a * x, b * y, c * z]
            }),
            CatalogHypersurface::Torus { major, minor } => embedding_fn(move |p| {
                let w = major + minor * p[0].cos();
                vec![w * p[1].cos(), w * p[1].sin(), minor * p[0].sin()]
            }),
            CatalogHypersurface::SphereInS3 { radius } => embedding_fn(move |p| {
                let (x, y, z) = ang(p);
                let s = radius.sin();
                vec![radius.cos(), s * x, s * y, s * z]
            }),
            CatalogHypersurface::SphereInH3 { radius } => embedding_fn(move |p| {
                let (x, y, z) = ang(p);
                let s = radius.sinh();
                vec![radius.cosh(), s * x, s * y, s * z]
            }),
        }
    }

    /// Closed-form principal curvatures (ascending) at chart point `p`, if known.
    pub fn principal_curvatures(&self, p: &[f64]) -> Option<Vec<f64>> {
        let mut k = match *self {
            CatalogHypersurface::Sphere { radius } => vec![1.0 / radius; 2],
            CatalogHypersurface::Torus { major, minor } => {
                vec![p[0].cos() / (major + minor * p[0].cos()), 1.0 / minor]
            }
            CatalogHypersurface::SphereInS3 { radius } => vec![1.0 / radius.tan(); 2],
            CatalogHypersurface::SphereInH3 { radius } => vec![1.0 / radius.tanh(); 2],
            CatalogHypersurface::Ellipsoid { a, b, c } if a == b => {
                // Spheroid: meridian and parallel curvatures.
                let (s, co) = (p[0].sin(), p[0].cos());
                let q = (c * c * s * s + a * a * co * co).sqrt();
                vec![a * c / (q * q * q), c / (a * q)]
            }
            CatalogHypersurface::Ellipsoid { .. } => return None,
        };
        k.sort_by(f64::total_cmp);
        Some(k)
    }

    /// Enclosed-surface area in closed form, where known.
    pub fn area(&self) -> Option<f64> {
        match *self {
            CatalogHypersurface::Sphere { radius } => Some(4.0 * PI * radius * radius),
            CatalogHypersurface::Torus { major, minor } => Some(TAU * TAU * major * minor),
            CatalogHypersurface::SphereInS3 { radius } => Some(4.0 * PI * radius.sin().powi(2)),
            CatalogHypersurface::SphereInH3 { radius } => Some(4.0 * PI * radius.sinh().powi(2)),
            CatalogHypersurface::Ellipsoid { .. } => None,
        }
    }

    pub fn build(&self, level: usize, order: usize) -> Result<EmbeddedHypersurface> {
        embed_and_curvatures(&self.domain(level)?, &self.embedding(), self.space_form(), order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audits::Verdict;
    use crate::chart::scalar_fn;

    fn max_curvature_error(s: &CatalogHypersurface, hs: &EmbeddedHypersurface) -> f64 {
        let d = hs.manifold.domain();
        (0..d.len())
            .map(|k| {
                let exact = s.principal_curvatures(&d.point(k)).unwrap();
                exact.iter().zip(&hs.principal_curvatures[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn sphere_curvatures() {
        let s = CatalogHypersurface::Sphere { radius: 2.0 };
        let hs = s.build(1, 4).unwrap();
        assert!(max_curvature_error(&s, &hs) < 1e-3);
        let ones = vec![1.0; hs.manifold.len()];
        let area = integrate_weighted_volume(&hs.manifold, &ones);
        assert!((area - s.area().unwrap()).abs() < 1e-4 * area);
        assert!(hs.mean_curvature.values().iter().all(|h| (h - 1.0).abs() < 1e-3));
    }

    #[test]
    fn space_form_spheres() {
        for s in [CatalogHypersurface::SphereInS3 { radius: 0.7 }, CatalogHypersurface::SphereInH3 { radius: 0.7 }] {
            let hs = s.build(1, 4).unwrap();
            assert!(hs.model_defect < 1e-10);
            assert!(max_curvature_error(&s, &hs) < 1e-3, "{s:?}");
        }
    }

    #[test]
    fn torus_and_spheroid_curvatures() {
        for s in [CatalogHypersurface::Torus { major: 2.0, minor: 0.5 }, CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 }] {
            let e1 = max_curvature_error(&s, &s.build(1, 4).unwrap());
            let e2 = max_curvature_error(&s, &s.build(2, 4).unwrap());
            assert!(e2 < 1e-3 && e1 / e2 > 3.0, "{s:?}: {e1} {e2}");
        }
    }

    #[test]
    fn codazzi_defect_converges() {
        let s = CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 };
        let d1 = s.build(1, 4).unwrap().codazzi_defect().unwrap();
        let d2 = s.build(2, 4).unwrap().codazzi_defect().unwrap();
        assert!((d1 / d2).log2() >= 1.5, "{d1} {d2}");
    }

    #[test]
    fn elementary_symmetric_small() {
        assert_eq!(elementary_symmetric(&[1.0, 2.0, 3.0]), vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn newton_two_by_two() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 3.0]);
        let (s, p) = newton_tensors(&b);
        assert!((p[1].clone() - (DMatrix::identity(2, 2) * s[1] - &b)).abs().max() < 1e-14);
        assert!((p[1].trace() - 4.0).abs() < 1e-14);
        assert!(p[2].abs().max() < 1e-13);
    }

    #[test]
    fn round_sphere_newton_tensors() {
        let rho = 2.0;
        let hs = CatalogHypersurface::Sphere { radius: rho }.build(1, 4).unwrap();
        let f = newton_transforms(&hs);
        assert!(f.trace_defect < 1e-12);
        let k = 7;
        assert!((f.s[1].value(k) - 2.0 / rho).abs() < 1e-3);
        assert!((f.s[2].value(k) - 1.0 / (rho * rho)).abs() < 1e-3);
        let p1 = f.p[1].matrix_at(k);
        let g = hs.manifold.metric().g().matrix_at(k);
        assert!((p1 - g * (1.0 / rho)).abs().max() < 1e-3);
    }

    #[test]
    fn schouten_of_round_s3() {
        let m = Geometry::RoundSphere3.standard(1).unwrap();
        let f = schouten_and_tk(&m).unwrap();
        assert!(f.trace_defect < 1e-12);
        let node = m.domain().index(&[8, 8, 3]);
        assert!((f.s[1].value(node) - 1.5).abs() < 1e-3);
        assert!((f.s[2].value(node) - 0.75).abs() < 1e-3);
        let torus = Geometry::FlatTorus2.standard(0).unwrap();
        assert!(matches!(schouten_and_tk(&torus), Err(Error::DimensionTooLow { n: 2, min: 3 })));
    }

    #[test]
    fn sphere_mean_curvature_audit_vanishes() {
        let hs = CatalogHypersurface::Sphere { radius: 1.0 }.build(2, 4).unwrap();
        let r = audit_almost_schur(&hs.manifold, &SchurTarget::MeanCurvature, Some(&hs.second_fundamental_form), None)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.lhs.abs() < 1e-6 && r.rhs.abs() < 1e-6, "{r:?}");
        assert!((r.diagnostic("schur_constant").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_audit_passes() {
        let hs = CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 }.build(1, 4).unwrap();
        let m = hs.with_weights(scalar_fn(|_| 0.0), scalar_fn(|_| 1.0)).unwrap();
        let r = audit_almost_schur(&m, &SchurTarget::MeanCurvature, Some(&hs.second_fundamental_form), None).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.relative_margin > 0.0 && !r.sharp);
        assert!(matches!(
            audit_almost_schur(&m, &SchurTarget::Newton(1), None, None),
            Err(Error::InvalidTarget(_))
        ));
    }
}
