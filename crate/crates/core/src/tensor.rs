//! Grid-sampled tensor fields with exact storage symmetries.

use nalgebra::DMatrix;
use rayon::prelude::*;

/// Position of the unordered pair `(i, j)` in packed upper-triangular storage.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * (2 * n - a + 1) / 2 + (b - a)
}

/// Number of unordered pairs over `n` indices.
pub fn pair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Evaluate `f` at every node in parallel, writing `ncomp` values per node, and
/// return the result split into one array per component.
pub fn per_node<F>(len: usize, ncomp: usize, f: F) -> Vec<Vec<f64>>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let mut flat = vec![0.0; len * ncomp];
    if ncomp > 0 {
        flat.par_chunks_mut(ncomp)
            .enumerate()
            .for_each(|(node, out)| f(node, out));
    }
    (0..ncomp)
        .map(|c| (0..len).map(|node| flat[node * ncomp + c]).collect())
        .collect()
}

/// A tensor field of valence `(upper, lower)` sampled on a grid.
///
/// When `symmetric` is set the last two lower indices are stored once per
/// unordered pair, so the symmetry holds exactly.
#[derive(Clone, Debug)]
pub struct TensorField {
    dim: usize,
    upper: usize,
    lower: usize,
    symmetric: bool,
    len: usize,
    comps: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn zeros(dim: usize, upper: usize, lower: usize, symmetric: bool, len: usize) -> Self {
        assert!(!symmetric || lower >= 2, "symmetry needs two lower indices");
        let ncomp = Self::component_count(dim, upper, lower, symmetric);
        Self { dim, upper, lower, symmetric, len, comps: vec![vec![0.0; len]; ncomp] }
    }

    /// Symmetric (0,2) field built from per-node matrices.
    pub fn symmetric_from_fn<F>(dim: usize, len: usize, f: F) -> Self
    where
        F: Fn(usize) -> DMatrix<f64> + Sync,
    {
        let np = pair_count(dim);
        let comps = per_node(len, np, |node, out| {
            let m = f(node);
            for i in 0..dim {
                for j in i..dim {
                    out[pair_index(dim, i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
                }
            }
        });
        Self { dim, upper: 0, lower: 2, symmetric: true, len, comps }
    }

    /// Field with the given raw component arrays.
    pub fn from_components(
        dim: usize,
        upper: usize,
        lower: usize,
        symmetric: bool,
        comps: Vec<Vec<f64>>,
    ) -> Self {
        let ncomp = Self::component_count(dim, upper, lower, symmetric);
        assert_eq!(comps.len(), ncomp, "component count mismatch");
        let len = comps.first().map_or(0, Vec::len);
        assert!(comps.iter().all(|c| c.len() == len), "ragged components");
        Self { dim, upper, lower, symmetric, len, comps }
    }

    pub fn component_count(dim: usize, upper: usize, lower: usize, symmetric: bool) -> usize {
        let rank = upper + lower;
        if symmetric {
            dim.pow((rank - 2) as u32) * pair_count(dim)
        } else {
            dim.pow(rank as u32)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn slot(&self, idx: &[usize]) -> usize {
        let rank = self.upper + self.lower;
        assert_eq!(idx.len(), rank, "index count must equal the rank");
        let n = self.dim;
        if self.symmetric {
            let mut s = 0;
            for &i in &idx[..rank - 2] {
                s = s * n + i;
            }
            s * pair_count(n) + pair_index(n, idx[rank - 2], idx[rank - 1])
        } else {
            idx.iter().fold(0, |s, &i| s * n + i)
        }
    }

    pub fn component(&self, idx: &[usize]) -> &[f64] {
        &self.comps[self.slot(idx)]
    }

    pub fn component_mut(&mut self, idx: &[usize]) -> &mut [f64] {
        let s = self.slot(idx);
        &mut self.comps[s]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn get(&self, node: usize, idx: &[usize]) -> f64 {
        self.comps[self.slot(idx)][node]
    }

    /// Parity bitmask of a component under coordinate reflections: one bit per
    /// axis, toggled once for every occurrence of that axis among the indices.
    pub fn parity(idx: &[usize]) -> u32 {
        idx.iter().fold(0, |p, &i| p ^ (1 << i))
    }

    /// Components of a rank-2 field at one node.
    pub fn matrix_at(&self, node: usize) -> DMatrix<f64> {
        assert_eq!(self.upper + self.lower, 2, "matrix_at needs a rank-2 field");
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(node, &[i, j]))
    }

    /// Vector of components of a rank-1 field at one node.
    pub fn vector_at(&self, node: usize) -> Vec<f64> {
        assert_eq!(self.upper + self.lower, 1, "vector_at needs a rank-1 field");
        (0..self.dim).map(|i| self.comps[i][node]).collect()
    }

    /// Largest absolute component value over the grid.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Maximum over nodes of the largest |component| difference to the matrix returned by `f`.
    pub fn max_deviation<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> DMatrix<f64> + Sync,
    {
        (0..self.len)
            .into_par_iter()
            .map(|node| (self.matrix_at(node) - f(node)).abs().max())
            .reduce(|| 0.0, f64::max)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &TensorField, b: f64) -> TensorField {
        assert_eq!(self.comps.len(), other.comps.len(), "shape mismatch");
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        TensorField { comps, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> TensorField {
        TensorField {
            dim: self.dim,
            upper: self.upper,
            lower: self.lower,
            symmetric: self.symmetric,
            len: self.len,
            comps: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_a_bijection() {
        for n in 1..6 {
            let mut seen = vec![false; pair_count(n)];
            for i in 0..n {
                for j in i..n {
                    let p = pair_index(n, i, j);
                    assert_eq!(p, pair_index(n, j, i));
                    assert!(!seen[p]);
                    seen[p] = true;
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn symmetric_storage_is_exact() {
        let t = TensorField::symmetric_from_fn(3, 4, |node| {
            DMatrix::from_fn(3, 3, |i, j| (node * 10 + i * 3 + j) as f64)
        });
        for node in 0..4 {
            let m = t.matrix_at(node);
            assert_eq!(m, m.transpose());
        }
    }

    #[test]
    fn christoffel_shape_slots() {
        let mut g = TensorField::zeros(2, 1, 2, true, 1);
        g.component_mut(&[1, 0, 1])[0] = 3.0;
        assert_eq!(g.get(0, &[1, 1, 0]), 3.0);
        assert_eq!(TensorField::component_count(3, 1, 2, true), 18);
    }

    #[test]
    fn parity_counts_index_occurrences() {
        assert_eq!(TensorField::parity(&[0, 0]), 0);
        assert_eq!(TensorField::parity(&[1, 0, 1]), 1);
        assert_eq!(TensorField::parity(&[2, 0]), 0b101);
    }
}
