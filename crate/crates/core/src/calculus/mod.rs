//! Finite-difference differential geometry on chart manifolds: derivatives,
//! Christoffel symbols, Ricci curvature, Hessians, weighted Laplacians,
//! Bakry–Émery tensors and the Hessian-type tensor A.

pub mod stencil;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use stencil::{differentiate, fornberg_weights, DerivativeStencil};

use crate::chart::{ChartManifold, ScalarField};
use crate::error::{Error, Result};
use crate::tensor::{pair_count, pair_index, per_node, TensorField};

/// The dimension parameter m of the Bakry–Émery tensors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mdim {
    Finite(f64),
    Infinite,
}

impl Mdim {
    /// `1/(m − n)`, zero for m = ∞.
    pub fn inverse_gap(&self, n: usize) -> f64 {
        match self {
            Mdim::Finite(m) => 1.0 / (m - n as f64),
            Mdim::Infinite => 0.0,
        }
    }

    pub fn is_equal_dimension(&self, n: usize) -> bool {
        matches!(self, Mdim::Finite(m) if *m == n as f64)
    }

    /// Accept m ∈ (−∞, 0) ∪ [n, ∞) ∪ {∞}; m = n needs a constant φ.
    pub fn validate(&self, n: usize, phi_constant: bool) -> Result<()> {
        if let Mdim::Finite(m) = *self {
            if !(m.is_finite() && (m < 0.0 || m >= n as f64)) {
                return Err(Error::InvalidDimensionParameter { m, n });
            }
            if m == n as f64 && !phi_constant {
                return Err(Error::NonconstantPhiAtEqualDimension);
            }
        }
        Ok(())
    }
}

/// Smallest eigenvalue λ with `t − λ g` singular, for symmetric `t` and SPD `g`.
pub fn min_generalized_eigenvalue(t: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    generalized_eigenvalues(t, g).into_iter().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of the pencil (t, g), ascending.
pub fn generalized_eigenvalues(t: &DMatrix<f64>, g: &DMatrix<f64>) -> Vec<f64> {
    let l = g.clone().cholesky().expect("metric must be SPD").unpack();
    let linv = l.try_inverse().expect("Cholesky factor is invertible");
    let c = &linv * t * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Squared norm g^{ik} g^{jl} T_ij T_kl of a covariant 2-tensor.
pub fn norm_sq(t: &DMatrix<f64>, ginv: &DMatrix<f64>) -> f64 {
    let a = ginv * t * ginv;
    a.component_mul(t).sum()
}

fn second_derivative(m: &ChartManifold, f: &ScalarField, a: usize, b: usize) -> Result<Vec<f64>> {
    let d = m.domain();
    let p = m.stencil_order();
    if a == b {
        differentiate(d, f.values(), f.parity(), a, 2, p)
    } else {
        let fb = differentiate(d, f.values(), f.parity(), b, 1, p)?;
        differentiate(d, &fb, f.parity() ^ (1 << b), a, 1, p)
    }
}

/// ∂f/∂x^axis, ∂²f/∂(x^axis)², or the mixed ∂²f/∂x^axis∂x^mixed.
pub fn partial_derivative(
    m: &ChartManifold,
    f: &ScalarField,
    axis: usize,
    order: usize,
    mixed: Option<usize>,
) -> Result<ScalarField> {
    let bit = |a: usize| 1u32 << a;
    match (order, mixed) {
        (1, None) => {
            let v = differentiate(m.domain(), f.values(), f.parity(), axis, 1, m.stencil_order())?;
            Ok(ScalarField::from_values(v).with_parity(f.parity() ^ bit(axis)))
        }
        (2, None) => Ok(ScalarField::from_values(second_derivative(m, f, axis, axis)?).with_parity(f.parity())),
        (_, Some(b)) => {
            let v = second_derivative(m, f, axis, b)?;
            Ok(ScalarField::from_values(v).with_parity(f.parity() ^ bit(axis) ^ bit(b)))
        }
        _ => Err(Error::Input(format!("unsupported derivative order {order}"))),
    }
}

/// All first partial derivatives of a field.
pub fn gradient_components(m: &ChartManifold, f: &ScalarField) -> Result<Vec<Vec<f64>>> {
    (0..m.dim())
        .map(|a| differentiate(m.domain(), f.values(), f.parity(), a, 1, m.stencil_order()))
        .collect()
}

/// Second derivatives of a field, packed by unordered axis pair.
fn second_derivatives(m: &ChartManifold, f: &ScalarField, grad: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.dim();
    let d = m.domain();
    let p = m.stencil_order();
    let mut out = vec![Vec::new(); pair_count(n)];
    for a in 0..n {
        for b in a..n {
            out[pair_index(n, a, b)] = if a == b {
                differentiate(d, f.values(), f.parity(), a, 2, p)?
            } else {
                differentiate(d, &grad[b], f.parity() ^ (1 << b), a, 1, p)?
            };
        }
    }
    Ok(out)
}

/// Derivatives ∂_l g_ij, indexed `[l][pair(i,j)]`.
fn metric_first_derivatives(m: &ChartManifold) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = m.dim();
    let g = m.metric().g();
    (0..n)
        .map(|l| {
            let mut row = vec![Vec::new(); pair_count(n)];
            for i in 0..n {
                for j in i..n {
                    let parity = TensorField::parity(&[i, j]);
                    row[pair_index(n, i, j)] =
                        differentiate(m.domain(), g.component(&[i, j]), parity, l, 1, m.stencil_order())?;
                }
            }
            Ok(row)
        })
        .collect()
}

fn christoffel_from(m: &ChartManifold, dg: &[Vec<Vec<f64>>]) -> TensorField {
    let n = m.dim();
    let np = pair_count(n);
    let ginv = m.metric().inverse();
    let comps = per_node(m.len(), n * np, |node, out| {
        let gi = ginv.matrix_at(node);
        let d = |l: usize, i: usize, j: usize| dg[l][pair_index(n, i, j)][node];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += gi[(k, l)] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                    }
                    out[k * np + pair_index(n, i, j)] = 0.5 * s;
                }
            }
        }
    });
    TensorField::from_components(n, 1, 2, true, comps)
}

/// Christoffel symbols Γ^k_ij of the chart metric.
pub fn christoffel(m: &ChartManifold) -> Result<TensorField> {
    let dg = metric_first_derivatives(m)?;
    Ok(christoffel_from(m, &dg))
}

/// Christoffel symbols and Ricci tensor.
///
/// Γ comes from first derivatives of g. The Riemann tensor is assembled from
/// second derivatives of g and products of Γ evaluated at the nodes, so no
/// finite difference is ever taken of Γ itself: near a coordinate pole Γ is
/// singular while the metric components stay smooth.
pub fn christoffel_and_curvature(m: &ChartManifold) -> Result<(TensorField, TensorField)> {
    let n = m.dim();
    let np = pair_count(n);
    let len = m.len();
    let dg = metric_first_derivatives(m)?;
    let gamma = christoffel_from(m, &dg);
    let g = m.metric().g();
    let ginv = m.metric().inverse();

    // Ric_bd = g^ac R_abcd with
    // R_abcd = ½(∂b∂c g_ad + ∂a∂d g_bc − ∂a∂c g_bd − ∂b∂d g_ac) + g_np(Γ^n_bc Γ^p_ad − Γ^n_bd Γ^p_ac).
    let mut ric = per_node(len, np, |node, out| {
        let gm = g.matrix_at(node);
        let gi = ginv.matrix_at(node);
        let gam = |k: usize, i: usize, j: usize| gamma.get(node, &[k, i, j]);
        for b in 0..n {
            for d in b..n {
                let mut s = 0.0;
                for a in 0..n {
                    for c in 0..n {
                        if gi[(a, c)] == 0.0 {
                            continue;
                        }
                        let mut q = 0.0;
                        for nn in 0..n {
                            for p in 0..n {
                                q += gm[(nn, p)] * (gam(nn, b, c) * gam(p, a, d) - gam(nn, b, d) * gam(p, a, c));
                            }
                        }
                        s += gi[(a, c)] * q;
                    }
                }
                out[pair_index(n, b, d)] = s;
            }
        }
    });

    // Each term of the second-derivative part as (derivative pair, metric pair, Ricci pair, a, c, sign).
    let mut terms: Vec<(usize, usize, usize, usize, usize, f64)> = Vec::new();
    for b in 0..n {
        for d in b..n {
            for a in 0..n {
                for c in 0..n {
                    let bd = pair_index(n, b, d);
                    terms.push((pair_index(n, b, c), pair_index(n, a, d), bd, a, c, 0.5));
                    terms.push((pair_index(n, a, d), pair_index(n, b, c), bd, a, c, 0.5));
                    terms.push((pair_index(n, a, c), pair_index(n, b, d), bd, a, c, -0.5));
                    terms.push((pair_index(n, b, d), pair_index(n, a, c), bd, a, c, -0.5));
                }
            }
        }
    }
    let d = m.domain();
    let p = m.stencil_order();
    let mut flat = vec![0.0; len * np];
    for x in 0..n {
        for y in x..n {
            let xy = pair_index(n, x, y);
            let mut dd = vec![Vec::new(); np];
            for i in 0..n {
                for j in i..n {
                    let parity = TensorField::parity(&[i, j]);
                    dd[pair_index(n, i, j)] = if x == y {
                        differentiate(d, g.component(&[i, j]), parity, x, 2, p)?
                    } else {
                        differentiate(d, &dg[y][pair_index(n, i, j)], parity ^ (1 << y), x, 1, p)?
                    };
                }
            }
            let local: Vec<_> = terms.iter().filter(|t| t.0 == xy).collect();
            flat.par_chunks_mut(np).enumerate().for_each(|(node, out)| {
                for &&(_, pq, bd, a, c, sign) in &local {
                    let gac = ginv.get(node, &[a, c]);
                    if gac != 0.0 {
                        out[bd] += sign * gac * dd[pq][node];
                    }
                }
            });
        }
    }
    for (c, comp) in ric.iter_mut().enumerate() {
        for (node, v) in comp.iter_mut().enumerate() {
            *v += flat[node * np + c];
        }
    }
    Ok((gamma, TensorField::from_components(n, 0, 2, true, ric)))
}

/// Scalar curvature g^ij R_ij.
pub fn scalar_curvature(m: &ChartManifold, ric: &TensorField) -> ScalarField {
    let ginv = m.metric().inverse();
    let v = (0..m.len())
        .into_par_iter()
        .map(|node| trace(&ric.matrix_at(node), &ginv.matrix_at(node)))
        .collect();
    ScalarField::from_values(v)
}

/// g^ij T_ij.
pub fn trace(t: &DMatrix<f64>, ginv: &DMatrix<f64>) -> f64 {
    ginv.component_mul(t).sum()
}

/// Hessian, gradient and Laplacians of one function.
#[derive(Clone, Debug)]
pub struct Hessian {
    /// Partial derivatives ∂_i f.
    pub grad: Vec<Vec<f64>>,
    /// ∇²f.
    pub hess: TensorField,
    /// Δf.
    pub lap: ScalarField,
    /// Δ_φ f = Δf − ⟨∇φ, ∇f⟩.
    pub lap_phi: ScalarField,
}

/// A chart manifold together with its connection and ∂φ, reused across operators.
pub struct Differential<'a> {
    m: &'a ChartManifold,
    gamma: TensorField,
    dphi: Vec<Vec<f64>>,
}

impl<'a> Differential<'a> {
    pub fn new(m: &'a ChartManifold) -> Result<Self> {
        let gamma = christoffel(m)?;
        let dphi = gradient_components(m, m.phi())?;
        Ok(Self { m, gamma, dphi })
    }

    pub fn with_gamma(m: &'a ChartManifold, gamma: TensorField) -> Result<Self> {
        let dphi = gradient_components(m, m.phi())?;
        Ok(Self { m, gamma, dphi })
    }

    pub fn manifold(&self) -> &ChartManifold {
        self.m
    }

    pub fn gamma(&self) -> &TensorField {
        &self.gamma
    }

    /// ∂_i φ.
    pub fn dphi(&self) -> &[Vec<f64>] {
        &self.dphi
    }

    pub fn hessian(&self, f: &ScalarField) -> Result<Hessian> {
        let m = self.m;
        let n = m.dim();
        let grad = gradient_components(m, f)?;
        let second = second_derivatives(m, f, &grad)?;
        let gamma = &self.gamma;
        let hess_comps = per_node(m.len(), pair_count(n), |node, out| {
            for i in 0..n {
                for j in i..n {
                    let mut s = second[pair_index(n, i, j)][node];
                    for k in 0..n {
                        s -= gamma.get(node, &[k, i, j]) * grad[k][node];
                    }
                    out[pair_index(n, i, j)] = s;
                }
            }
        });
        let hess = TensorField::from_components(n, 0, 2, true, hess_comps);
        let ginv = m.metric().inverse();
        let (lap, lap_phi): (Vec<f64>, Vec<f64>) = (0..m.len())
            .into_par_iter()
            .map(|node| {
                let gi = ginv.matrix_at(node);
                let l = trace(&hess.matrix_at(node), &gi);
                let mut drift = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        drift += gi[(i, j)] * self.dphi[i][node] * grad[j][node];
                    }
                }
                (l, l - drift)
            })
            .unzip();
        Ok(Hessian {
            grad,
            hess,
            lap: ScalarField::from_values(lap),
            lap_phi: ScalarField::from_values(lap_phi),
        })
    }

    /// Weighted divergence e^φ div(e^{−φ} X) of a vector field with components X^i.
    pub fn weighted_divergence(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        let m = self.m;
        let n = m.dim();
        let sqrt_g = m.metric().sqrt_det();
        let phi = m.phi().values();
        let density = m.domain().density_parity();
        let mut acc = vec![0.0; m.len()];
        for i in 0..n {
            let flux: Vec<f64> = (0..m.len()).map(|k| sqrt_g[k] * (-phi[k]).exp() * x[i][k]).collect();
            let d = differentiate(m.domain(), &flux, density ^ (1 << i), i, 1, m.stencil_order())?;
            for (a, v) in acc.iter_mut().zip(d) {
                *a += v;
            }
        }
        Ok(acc
            .iter()
            .enumerate()
            .map(|(k, v)| v / (sqrt_g[k] * (-phi[k]).exp()))
            .collect())
    }

    /// Covariant divergence (div T)_i = g^jk ∇_k T_ij of a symmetric 2-tensor.
    pub fn divergence(&self, t: &TensorField) -> Result<Vec<Vec<f64>>> {
        let m = self.m;
        let n = m.dim();
        let mut dt = vec![vec![Vec::new(); pair_count(n)]; n];
        for (k, row) in dt.iter_mut().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let parity = TensorField::parity(&[i, j]);
                    row[pair_index(n, i, j)] =
                        differentiate(m.domain(), t.component(&[i, j]), parity, k, 1, m.stencil_order())?;
                }
            }
        }
        let ginv = m.metric().inverse();
        let gamma = &self.gamma;
        Ok(per_node(m.len(), n, |node, out| {
            let gi = ginv.matrix_at(node);
            let tm = t.matrix_at(node);
            for (i, o) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        if gi[(j, k)] == 0.0 {
                            continue;
                        }
                        let mut c = dt[k][pair_index(n, i, j)][node];
                        for l in 0..n {
                            c -= gamma.get(node, &[l, k, i]) * tm[(l, j)] + gamma.get(node, &[l, k, j]) * tm[(i, l)];
                        }
                        s += gi[(j, k)] * c;
                    }
                }
                *o = s;
            }
        }))
    }

    /// Bakry–Émery tensor Ric + ∇²φ − dφ⊗dφ/(m − n).
    pub fn bakry_emery(&self, ric: &TensorField, mdim: Mdim) -> Result<TensorField> {
        let m = self.m;
        let n = m.dim();
        mdim.validate(n, m.phi_is_constant())?;
        if mdim.is_equal_dimension(n) {
            return Ok(ric.clone());
        }
        let hphi = self.hessian(m.phi())?;
        let k = mdim.inverse_gap(n);
        let dphi = &self.dphi;
        Ok(TensorField::symmetric_from_fn(n, m.len(), |node| {
            let mut t = ric.matrix_at(node) + hphi.hess.matrix_at(node);
            for i in 0..n {
                for j in 0..n {
                    t[(i, j)] -= k * dphi[i][node] * dphi[j][node];
                }
            }
            t
        }))
    }

    /// R̂ic^V = (Δ_φV/V) g − ∇²V/V + Ric_{φ,m}.
    pub fn hat_ric_v(&self, ric: &TensorField, mdim: Mdim) -> Result<TensorField> {
        let m = self.m;
        let be = self.bakry_emery(ric, mdim)?;
        let hv = self.hessian(m.v())?;
        let v = m.v().values();
        let g = m.metric().g();
        Ok(TensorField::symmetric_from_fn(m.dim(), m.len(), |node| {
            g.matrix_at(node) * (hv.lap_phi.value(node) / v[node]) - hv.hess.matrix_at(node) / v[node]
                + be.matrix_at(node)
        }))
    }

    /// A = ∇²f − (f/V)∇²V, its traceless part Å and trA = Δf − (f/V)ΔV.
    pub fn traceless_a(&self, f: &ScalarField) -> Result<TracelessA> {
        let m = self.m;
        let n = m.dim();
        let hf = self.hessian(f)?;
        let hv = self.hessian(m.v())?;
        let v = m.v().values();
        let ginv = m.metric().inverse();
        let g = m.metric().g();
        let a = TensorField::symmetric_from_fn(n, m.len(), |node| {
            hf.hess.matrix_at(node) - hv.hess.matrix_at(node) * (f.value(node) / v[node])
        });
        let tr: Vec<f64> = (0..m.len())
            .into_par_iter()
            .map(|node| trace(&a.matrix_at(node), &ginv.matrix_at(node)))
            .collect();
        let aring = TensorField::symmetric_from_fn(n, m.len(), |node| {
            a.matrix_at(node) - g.matrix_at(node) * (tr[node] / n as f64)
        });
        Ok(TracelessA { a, aring, tr_a: ScalarField::from_values(tr), hf, hv })
    }
}

/// Output of [`traceless_A`].
#[derive(Clone, Debug)]
pub struct TracelessA {
    pub a: TensorField,
    pub aring: TensorField,
    pub tr_a: ScalarField,
    /// Hessian data of f.
    pub hf: Hessian,
    /// Hessian data of V.
    pub hv: Hessian,
}

/// ∇²f, Δf and Δ_φ f.
pub fn hessian_and_laplacians(m: &ChartManifold, f: &ScalarField) -> Result<(TensorField, ScalarField, ScalarField)> {
    let h = Differential::new(m)?.hessian(f)?;
    Ok((h.hess, h.lap, h.lap_phi))
}

/// Ric_{φ,m}.
pub fn bakry_emery(m: &ChartManifold, mdim: Mdim) -> Result<TensorField> {
    mdim.validate(m.dim(), m.phi_is_constant())?;
    let (gamma, ric) = christoffel_and_curvature(m)?;
    Differential::with_gamma(m, gamma)?.bakry_emery(&ric, mdim)
}

/// R̂ic^V_{φ,m} together with its pointwise smallest eigenvalue relative to g.
pub fn hat_ric_v(m: &ChartManifold, mdim: Mdim) -> Result<(TensorField, ScalarField)> {
    mdim.validate(m.dim(), m.phi_is_constant())?;
    let (gamma, ric) = christoffel_and_curvature(m)?;
    let t = Differential::with_gamma(m, gamma)?.hat_ric_v(&ric, mdim)?;
    let mins = min_eigenvalue_field(m, &t);
    Ok((t, mins))
}

/// Pointwise smallest eigenvalue of R̂ic^V_{φ,m} with a discretisation-error
/// estimate: twice the difference to the same field computed with stencils
/// two orders higher (or lower when the grid is too coarse).
#[derive(Clone, Debug)]
pub struct ResolvedMinimum {
    pub min: Vec<f64>,
    pub uncertainty: Vec<f64>,
    /// max |tr_g R̂ic^V|, floored at 1.
    pub trace_scale: f64,
}

impl ResolvedMinimum {
    /// Relative tolerance of PSD hypothesis checks.
    pub const TOLERANCE: f64 = 1e-8;

    /// min over nodes of w·(λ_min + uncertainty), with the node attaining it.
    pub fn witness<F: Fn(usize) -> f64>(&self, weight: F) -> (f64, usize) {
        self.min
            .iter()
            .zip(&self.uncertainty)
            .enumerate()
            .map(|(k, (l, e))| (weight(k) * (l + e), k))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    }

    /// Smallest raw eigenvalue.
    pub fn raw_min(&self) -> f64 {
        self.min.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn tolerance(&self) -> f64 {
        Self::TOLERANCE * self.trace_scale
    }
}

pub fn resolved_hat_ric_min(m: &ChartManifold, mdim: Mdim) -> Result<ResolvedMinimum> {
    let (t, mins) = hat_ric_v(m, mdim)?;
    let p = m.stencil_order();
    let mut alt = None;
    for q in [p + 2, p.saturating_sub(2)] {
        if !(2..=8).contains(&q) {
            continue;
        }
        match hat_ric_v(&m.clone().with_stencil_order(q), mdim) {
            Ok((_, other)) => {
                alt = Some(other);
                break;
            }
            Err(Error::ResolutionTooLow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let uncertainty = match alt {
        Some(other) => mins.values().iter().zip(other.values()).map(|(a, b)| 2.0 * (a - b).abs()).collect(),
        None => vec![0.0; m.len()],
    };
    let ginv = m.metric().inverse();
    let trace_scale = (0..m.len())
        .map(|k| trace(&t.matrix_at(k), &ginv.matrix_at(k)).abs())
        .fold(1.0, f64::max);
    Ok(ResolvedMinimum { min: mins.into_values(), uncertainty, trace_scale })
}

/// Pointwise smallest eigenvalue of a symmetric tensor relative to g.
pub fn min_eigenvalue_field(m: &ChartManifold, t: &TensorField) -> ScalarField {
    let g = m.metric().g();
    ScalarField::from_values(
        (0..m.len())
            .into_par_iter()
            .map(|node| min_generalized_eigenvalue(&t.matrix_at(node), &g.matrix_at(node)))
            .collect(),
    )
}

/// Largest pointwise operator norm (largest |eigenvalue| relative to g) of a symmetric tensor.
pub fn max_operator_norm(m: &ChartManifold, t: &TensorField) -> f64 {
    let g = m.metric().g();
    (0..m.len())
        .into_par_iter()
        .map(|node| {
            generalized_eigenvalues(&t.matrix_at(node), &g.matrix_at(node))
                .into_iter()
                .fold(0.0f64, |a, e| a.max(e.abs()))
        })
        .reduce(|| 0.0, f64::max)
}

/// A, Å and trA.
#[allow(non_snake_case)]
pub fn traceless_A(m: &ChartManifold, f: &ScalarField) -> Result<(TensorField, TensorField, ScalarField)> {
    let t = Differential::new(m)?.traceless_a(f)?;
    Ok((t.a, t.aring, t.tr_a))
}

/// Residuals of the two equality conditions of the pointwise decomposition.
#[derive(Clone, Debug)]
pub struct EqualityResiduals {
    /// Å = A − (trA/n) g.
    pub traceless: TensorField,
    /// trA + n/(m − n) · V⟨∇φ, ∇(f/V)⟩; absent at m = n.
    pub trace: Option<ScalarField>,
    /// Largest pointwise operator norm of `traceless`.
    pub traceless_max: f64,
    /// Largest |trace|.
    pub trace_max: Option<f64>,
}

/// Both equality-case residuals; at m = n only the first is defined.
pub fn equality_case_residuals(m: &ChartManifold, f: &ScalarField, mdim: Mdim) -> Result<EqualityResiduals> {
    let r = equality_residuals_lenient(m, f, mdim)?;
    if r.trace.is_none() {
        return Err(Error::EqualDimensionResidualUndefined);
    }
    Ok(r)
}

/// Like [`equality_case_residuals`] but without the trace residual at m = n.
pub fn equality_residuals_lenient(m: &ChartManifold, f: &ScalarField, mdim: Mdim) -> Result<EqualityResiduals> {
    let n = m.dim();
    mdim.validate(n, m.phi_is_constant())?;
    let dif = Differential::new(m)?;
    let ta = dif.traceless_a(f)?;
    let traceless_max = max_operator_norm(m, &ta.aring);
    if mdim.is_equal_dimension(n) {
        return Ok(EqualityResiduals { traceless: ta.aring, trace: None, traceless_max, trace_max: None });
    }
    let k = n as f64 * mdim.inverse_gap(n);
    let drift = drift_term(m, &dif, f, &ta)?;
    let trace: Vec<f64> = (0..m.len()).map(|node| ta.tr_a.value(node) + k * drift[node]).collect();
    let trace_max = trace.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(EqualityResiduals {
        traceless: ta.aring,
        trace: Some(ScalarField::from_values(trace)),
        traceless_max,
        trace_max: Some(trace_max),
    })
}

/// V⟨∇φ, ∇(f/V)⟩ at every node.
fn drift_term(m: &ChartManifold, dif: &Differential, f: &ScalarField, ta: &TracelessA) -> Result<Vec<f64>> {
    let n = m.dim();
    let v = m.v().values();
    let ginv = m.metric().inverse();
    Ok((0..m.len())
        .into_par_iter()
        .map(|node| {
            let gi = ginv.matrix_at(node);
            let u_grad: Vec<f64> = (0..n)
                .map(|i| (ta.hf.grad[i][node] - f.value(node) / v[node] * ta.hv.grad[i][node]) / v[node])
                .collect();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += gi[(i, j)] * dif.dphi()[i][node] * u_grad[j];
                }
            }
            v[node] * s
        })
        .collect())
}

/// Pointwise check of the decomposition
/// |A|² + Ric_φ(W, W) = |Å|² + (Δ_φf − (f/V)Δ_φV)²/m + Ric_{φ,m}(W, W) + (a·trA + s·b·V⟨∇φ, ∇u⟩)²
/// with u = f/V, W = V∇u, a = √((m−n)/(mn)), b = √(n/(m(m−n))) and s the sign of m.
#[derive(Clone, Debug)]
pub struct DecompositionCheck {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Largest |lhs − rhs| / (1 + |lhs|).
    pub max_defect: f64,
}

pub fn pointwise_decomposition(m: &ChartManifold, f: &ScalarField, mdim: f64) -> Result<DecompositionCheck> {
    let n = m.dim();
    let md = Mdim::Finite(mdim);
    md.validate(n, m.phi_is_constant())?;
    if md.is_equal_dimension(n) {
        return Err(Error::EqualDimensionResidualUndefined);
    }
    let (gamma, ric) = christoffel_and_curvature(m)?;
    let dif = Differential::with_gamma(m, gamma)?;
    let ta = dif.traceless_a(f)?;
    let ric_phi = dif.bakry_emery(&ric, Mdim::Infinite)?;
    let ric_m = dif.bakry_emery(&ric, md)?;
    let drift = drift_term(m, &dif, f, &ta)?;
    let v = m.v().values();
    let ginv = m.metric().inverse();
    let nf = n as f64;
    let a = ((mdim - nf) / (mdim * nf)).sqrt();
    let b = (nf / (mdim * (mdim - nf))).sqrt();
    let s = mdim.signum();
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = (0..m.len())
        .into_par_iter()
        .map(|node| {
            let gi = ginv.matrix_at(node);
            let w: Vec<f64> = (0..n)
                .map(|i| {
                    let du = (ta.hf.grad[i][node] - f.value(node) / v[node] * ta.hv.grad[i][node]) / v[node];
                    v[node] * du
                })
                .collect();
            let wv = &gi * nalgebra::DVector::from_vec(w);
            let quad = |t: &TensorField| (t.matrix_at(node) * &wv).dot(&wv);
            let lap_term = ta.hf.lap_phi.value(node) - f.value(node) / v[node] * ta.hv.lap_phi.value(node);
            let tr = ta.tr_a.value(node);
            let l = norm_sq(&ta.a.matrix_at(node), &gi) + quad(&ric_phi);
            let r = norm_sq(&ta.aring.matrix_at(node), &gi)
                + lap_term * lap_term / mdim
                + quad(&ric_m)
                + (a * tr + s * b * drift[node]).powi(2);
            (l, r)
        })
        .unzip();
    let max_defect = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| (l - r).abs() / (1.0 + l.abs()))
        .fold(0.0, f64::max);
    Ok(DecompositionCheck { lhs, rhs, max_defect })
}
