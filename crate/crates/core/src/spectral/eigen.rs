//! Symmetric-definite eigensolvers for the first nonzero eigenpair of a
//! pencil `K x = λ M x` with diagonal `M` and a known kernel of `K`.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{Csr, SpdFactor};
use crate::error::{Error, Result};

/// Eigenvalues with |λ| below this fraction of the spectral scale are trivial.
pub const ZERO_THRESHOLD: f64 = 1e-8;

/// An eigenpair and its residual ‖Kx − λMx‖/‖x‖.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mdot(a: &[f64], b: &[f64], m: &[f64]) -> f64 {
    a.iter().zip(b).zip(m).map(|((x, y), w)| x * y * w).sum()
}

/// Orthonormalise vectors with respect to the diagonal inner product `m`,
/// dropping those that become negligible.
fn m_orthonormalize(vs: &[Vec<f64>], m: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        let norm0 = mdot(&w, &w, m).sqrt();
        for _ in 0..2 {
            for q in &out {
                let c = mdot(&w, q, m);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = mdot(&w, &w, m).sqrt();
        if norm > 1e-10 * norm0.max(f64::MIN_POSITIVE) {
            w.iter_mut().for_each(|a| *a /= norm);
            out.push(w);
        }
    }
    out
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>], m: &[f64]) {
    for q in basis {
        let c = mdot(v, q, m);
        v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
    }
}

/// ‖Kx − λMx‖/‖x‖.
pub fn pencil_residual(k: &Csr, m: &[f64], value: f64, x: &[f64]) -> f64 {
    let kx = k.matvec(x);
    let r: f64 = kx.iter().zip(x).zip(m).map(|((a, b), w)| (a - value * w * b).powi(2)).sum();
    r.sqrt() / dot(x, x).sqrt()
}

/// Ascending eigenpairs of the dense pencil `(k, diag(d))` on the
/// `d`-orthogonal complement of `kernel`, with trivial eigenvalues removed.
pub fn dense_nonzero_spectrum(k: &Mat<f64>, d: &[f64], kernel: &[Vec<f64>]) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = d.len();
    if d.iter().any(|&w| w <= 0.0) {
        return Err(Error::SolverDivergence("mass matrix must be positive".into()));
    }
    let s: Vec<f64> = d.iter().map(|w| w.sqrt()).collect();
    let mut c = Mat::from_fn(n, n, |i, j| 0.5 * (k[(i, j)] + k[(j, i)]) / (s[i] * s[j]));
    let q: Vec<Vec<f64>> = m_orthonormalize(kernel, d)
        .into_iter()
        .map(|v| v.iter().zip(&s).map(|(a, b)| a * b).collect())
        .collect();
    if !q.is_empty() {
        let scale = (0..n).map(|i| c[(i, i)].abs()).fold(0.0, f64::max).max(1.0) * 4.0;
        // C ← P C P + scale·Q Qᵀ pushes the kernel to the top of the spectrum.
        let cq: Vec<Vec<f64>> = q
            .iter()
            .map(|v| (0..n).map(|i| (0..n).map(|j| c[(i, j)] * v[j]).sum()).collect())
            .collect();
        let qcq: Vec<Vec<f64>> = q.iter().map(|a| cq.iter().map(|b| dot(a, b)).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                let mut v = c[(i, j)];
                for (a, qa) in q.iter().enumerate() {
                    v -= qa[i] * cq[a][j] + cq[a][i] * qa[j];
                    for (b, qb) in q.iter().enumerate() {
                        v += qa[i] * qcq[a][b] * qb[j];
                    }
                    v += scale * qa[i] * qa[j];
                }
                c[(i, j)] = v;
            }
        }
    }
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::SolverDivergence(format!("dense eigensolver failed: {e:?}")))?;
    let vals = evd.S();
    let vecs = evd.U();
    let top = (0..n).map(|i| vals[i].abs()).fold(0.0, f64::max);
    let limit = n - q.len();
    Ok((0..limit)
        .filter(|&i| vals[i].abs() > ZERO_THRESHOLD * top.max(1.0))
        .map(|i| (vals[i], (0..n).map(|r| vecs[(r, i)] / s[r]).collect()))
        .collect())
}

/// Options of the shift-invert subspace iteration.
#[derive(Clone, Copy, Debug)]
pub struct SubspaceOptions {
    pub shift: f64,
    pub block: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self { shift: 1.0, block: 12, tolerance: 1e-11, max_iterations: 400, seed: 0x5eed }
    }
}

/// Smallest nonzero eigenpair of `K x = λ M x` by shift-invert subspace
/// iteration with `(K + σM)⁻¹ M`, deflating `kernel`. `M` may be singular
/// as long as `K + σM` is positive definite.
pub fn subspace_smallest_nonzero(k: &Csr, m: &[f64], kernel: &[Vec<f64>], opts: SubspaceOptions) -> Result<EigenPair> {
    let n = m.len();
    let factor = SpdFactor::new(&k.add(1.0, &Csr::diagonal(m), opts.shift))?;
    let kernel = m_orthonormalize(kernel, m);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let p = opts.block.min(n.saturating_sub(kernel.len())).max(1);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|i| if m[i] > 0.0 { rng.random_range(-1.0..1.0) } else { 0.0 }).collect())
        .collect();
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let rhs: Vec<Vec<f64>> = x.iter().map(|v| v.iter().zip(m).map(|(a, b)| a * b).collect()).collect();
        let mut y = factor.solve_columns(&rhs);
        for v in &mut y {
            project_out(v, &kernel, m);
        }
        let y = m_orthonormalize(&y, m);
        if y.is_empty() {
            return Err(Error::SolverDivergence("subspace collapsed".into()));
        }
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.matvec(v)).collect();
        let q = y.len();
        let kr = DMatrix::from_fn(q, q, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = kr.symmetric_eigen();
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, yi) in y.iter().enumerate() {
                    let w = eig.eigenvectors[(i, c)];
                    v.iter_mut().zip(yi).for_each(|(a, b)| *a += w * b);
                }
                v
            })
            .collect();
        let first = order
            .iter()
            .position(|&c| eig.eigenvalues[c].abs() > ZERO_THRESHOLD * top.max(1.0))
            .ok_or_else(|| Error::SolverDivergence("no nonzero eigenvalue in subspace".into()))?;
        let value = eig.eigenvalues[order[first]];
        let residual = pencil_residual(k, m, value, &x[first]);
        if residual < opts.tolerance || (residual < 1e3 * opts.tolerance && residual >= last) {
            return Ok(EigenPair { value, vector: x[first].clone(), residual });
        }
        last = residual;
    }
    Err(Error::SolverDivergence(format!(
        "subspace iteration did not reach residual {} in {} iterations",
        opts.tolerance, opts.max_iterations
    )))
}

/// First nonzero eigenpair of `(K, diag(m))` with `m > 0`, dense for small
/// systems and by subspace iteration otherwise.
pub fn smallest_nonzero(k: &Csr, m: &[f64], kernel: &[Vec<f64>], dense_limit: usize) -> Result<EigenPair> {
    if m.len() <= dense_limit {
        let dense = k.to_dense();
        let km = Mat::from_fn(m.len(), m.len(), |i, j| dense[i][j]);
        let spectrum = dense_nonzero_spectrum(&km, m, kernel)?;
        let (value, vector) = spectrum
            .into_iter()
            .next()
            .ok_or_else(|| Error::SolverDivergence("no nonzero eigenvalue".into()))?;
        let residual = pencil_residual(k, m, value, &vector);
        Ok(EigenPair { value, vector, residual })
    } else {
        subspace_smallest_nonzero(k, m, kernel, SubspaceOptions::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            t.extend([(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)]);
        }
        Csr::from_triplets(n, t)
    }

    #[test]
    fn ring_laplacian_both_paths() {
        let n = 40;
        let k = ring(n);
        let m = vec![1.0; n];
        let exact = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        let dense = smallest_nonzero(&k, &m, &[vec![1.0; n]], 1000).unwrap();
        let sparse = subspace_smallest_nonzero(&k, &m, &[vec![1.0; n]], SubspaceOptions { shift: 0.01, ..Default::default() })
            .unwrap();
        assert!((dense.value - exact).abs() < 1e-12);
        assert!((sparse.value - exact).abs() < 1e-10, "{}", sparse.value);
        assert!(dense.residual < 1e-10 && sparse.residual < 1e-9);
        assert!(dot(&dense.vector, &m).abs() < 1e-10);
    }
}
