//! Discretisation of f ↦ Δ_φ f − (Δ_φ V/V) f, its auxiliary boundary-value
//! problems and the first nonzero eigenvalues of the closed, boundary,
//! Steklov and Wentzell problems.
//!
//! With u = f/V the operator satisfies V·Lf = e^φ div(e^{−φ} V² ∇u), so every
//! problem is assembled from the energy ∫ V²|∇u|² dμ, which is symmetric and
//! has the constants (f = V) as its exact discrete kernel.

pub mod eigen;
pub mod sparse;

use faer::Mat;

use crate::boundary::{boundary_geometry, BoundaryGeometry};
use crate::chart::{AxisKind, ChartManifold, ScalarField};
use crate::error::{Error, Result};
use crate::integrate::{integrate_boundary, integrate_weighted_volume};
pub use eigen::{EigenPair, SubspaceOptions, ZERO_THRESHOLD};
pub use sparse::{Csr, SpdFactor};

/// Sparse symmetric energy matrix of ∫ c^{ab} ∂_a u ∂_b u dx with
/// c^{ab} = V² e^{−φ} √g g^{ab}, on the nodes of a chart.
pub fn energy_matrix(m: &ChartManifold) -> Csr {
    let d = m.domain();
    let n = m.dim();
    let len = m.len();
    let v = m.v().values();
    let phi = m.phi().values();
    let sg = m.metric().sqrt_det();
    let ginv = m.metric().inverse();
    let coef = |k: usize, a: usize, b: usize| v[k] * v[k] * (-phi[k]).exp() * sg[k] * ginv.get(k, &[a, b]);
    let mut t: Vec<(usize, usize, f64)> = Vec::new();
    let mut multi = vec![0usize; n];
    for k in 0..len {
        d.multi_index_into(k, &mut multi);
        for a in 0..n {
            let ax = d.axis(a);
            let na = ax.resolution;
            let j = multi[a];
            let next = match ax.kind {
                AxisKind::Periodic => Some((j + 1) % na),
                AxisKind::Interval { .. } => (j + 1 < na).then_some(j + 1),
            };
            let Some(jn) = next else { continue };
            let kn = k + jn * d.stride(a) - j * d.stride(a);
            let h = ax.spacing();
            let other: f64 = (0..n).filter(|&b| b != a).map(|b| d.axis(b).cell_width(multi[b])).product();
            let w = 0.5 * (coef(k, a, a) + coef(kn, a, a)) * other / h;
            t.extend([(k, k, w), (kn, kn, w), (k, kn, -w), (kn, k, -w)]);
        }
        // Off-diagonal metric terms with nodal difference quotients.
        for a in 0..n {
            for b in (a + 1)..n {
                let c = coef(k, a, b);
                if c == 0.0 {
                    continue;
                }
                let ga = difference_row(m, k, &multi, a);
                let gb = difference_row(m, k, &multi, b);
                let w = c * d.cell_measure(k);
                for &(p, x) in &ga {
                    for &(q, y) in &gb {
                        t.push((p, q, w * x * y));
                        t.push((q, p, w * x * y));
                    }
                }
            }
        }
    }
    Csr::from_triplets(len, t)
}

/// Difference quotient approximating ∂_a at a node, as `(node, weight)` pairs.
fn difference_row(m: &ChartManifold, k: usize, multi: &[usize], a: usize) -> Vec<(usize, f64)> {
    let d = m.domain();
    let ax = d.axis(a);
    let na = ax.resolution;
    let h = ax.spacing();
    let s = d.stride(a);
    let j = multi[a];
    let at = |jj: usize| k + jj * s - j * s;
    match ax.kind {
        AxisKind::Periodic => vec![(at((j + 1) % na), 0.5 / h), (at((j + na - 1) % na), -0.5 / h)],
        AxisKind::Interval { .. } => {
            if j == 0 {
                vec![(at(1), 1.0 / h), (at(0), -1.0 / h)]
            } else if j + 1 == na {
                vec![(at(j), 1.0 / h), (at(j - 1), -1.0 / h)]
            } else {
                vec![(at(j + 1), 0.5 / h), (at(j - 1), -0.5 / h)]
            }
        }
    }
}

/// The discretised operator with its mass vectors and boundary data.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    /// Energy matrix acting on u = f/V.
    pub stiffness: Csr,
    /// Lumped e^{−φ}√g cell measure per node.
    pub weight: Vec<f64>,
    /// V at every node.
    pub v: Vec<f64>,
    /// Volume index of every boundary DOF (faces concatenated).
    pub boundary_nodes: Vec<usize>,
    /// Nodes not on the boundary.
    pub interior_nodes: Vec<usize>,
    /// Lumped V e^{−φ}√ḡ boundary cell measure per boundary DOF.
    pub boundary_mass: Vec<f64>,
    /// Tangential energy ∫ V²|∇̄u|² dσ on boundary DOFs.
    pub boundary_stiffness: Csr,
    /// Boundary DOF ranges of the individual faces.
    pub face_ranges: Vec<std::ops::Range<usize>>,
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Lumped V e^{−φ}√g mass of the closed problem.
    pub fn volume_mass(&self) -> Vec<f64> {
        self.v.iter().zip(&self.weight).map(|(v, w)| v * w).collect()
    }

    /// L f = −(K (f/V)) / (V w), meaningful at interior nodes.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = f.iter().zip(&self.v).map(|(f, v)| f / v).collect();
        self.stiffness
            .matvec(&u)
            .iter()
            .enumerate()
            .map(|(k, ku)| -ku / (self.v[k] * self.weight[k]))
            .collect()
    }

    /// Discrete conormal derivative V(f/V)_ν of an L-harmonic f at the boundary DOFs.
    pub fn conormal(&self, f: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = f.iter().zip(&self.v).map(|(f, v)| f / v).collect();
        let ku = self.stiffness.matvec(&u);
        self.boundary_nodes
            .iter()
            .zip(&self.boundary_mass)
            .map(|(&k, &b)| ku[k] / b)
            .collect()
    }

    /// Boundary trace of nodal values.
    pub fn trace(&self, f: &[f64]) -> Vec<f64> {
        self.boundary_nodes.iter().map(|&k| f[k]).collect()
    }

    /// Boundary mass embedded in the full node set.
    fn full_boundary_mass(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.len()];
        for (&k, &w) in self.boundary_nodes.iter().zip(&self.boundary_mass) {
            b[k] = w;
        }
        b
    }

    /// Boundary stiffness embedded in the full node set.
    fn full_boundary_stiffness(&self) -> Csr {
        let t = self
            .boundary_stiffness
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (self.boundary_nodes[r], self.boundary_nodes[c], v))
            .collect();
        Csr::from_triplets(self.len(), t)
    }
}

/// Assemble the operator, its masses and the boundary blocks.
pub fn assemble_operator(m: &ChartManifold) -> Result<DiscreteOperator> {
    let stiffness = energy_matrix(m);
    let sg = m.metric().sqrt_det();
    let phi = m.phi().values();
    let d = m.domain();
    let weight: Vec<f64> = (0..m.len()).map(|k| (-phi[k]).exp() * sg[k] * d.cell_measure(k)).collect();
    let v = m.v().values().to_vec();
    let mut boundary_nodes = Vec::new();
    let mut boundary_mass = Vec::new();
    let mut face_ranges = Vec::new();
    let mut bt = Vec::new();
    if d.has_boundary() {
        if d.has_corners() {
            return Err(Error::CornerBoundary);
        }
        let bg = boundary_geometry(m)?;
        for face in &bg.faces {
            let start = boundary_nodes.len();
            let fc = &face.chart;
            let fs = fc.metric().sqrt_det();
            let fp = fc.phi().values();
            let fv = fc.v().values();
            for j in 0..face.len() {
                boundary_mass.push(fv[j] * (-fp[j]).exp() * fs[j] * fc.domain().cell_measure(j));
            }
            bt.extend(energy_matrix(fc).triplets().into_iter().map(|(r, c, x)| (r + start, c + start, x)));
            boundary_nodes.extend(&face.nodes);
            face_ranges.push(start..boundary_nodes.len());
        }
    }
    let mut on_boundary = vec![false; m.len()];
    for &k in &boundary_nodes {
        on_boundary[k] = true;
    }
    let interior_nodes = (0..m.len()).filter(|&k| !on_boundary[k]).collect();
    let nb = boundary_nodes.len();
    Ok(DiscreteOperator {
        stiffness,
        weight,
        v,
        boundary_nodes,
        interior_nodes,
        boundary_mass,
        boundary_stiffness: Csr::from_triplets(nb, bt),
        face_ranges,
    })
}

/// Which eigenproblem an [`EigResult`] solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Closed,
    Boundary,
    Steklov,
    Wentzell,
}

impl ProblemKind {
    pub fn id(&self) -> &'static str {
        match self {
            ProblemKind::Closed => "closed",
            ProblemKind::Boundary => "boundary",
            ProblemKind::Steklov => "steklov",
            ProblemKind::Wentzell => "wentzell",
        }
    }
}

/// First nonzero eigenvalue with its eigenfunction f (not f/V).
#[derive(Clone, Debug)]
pub struct EigResult {
    pub kind: ProblemKind,
    pub eigenvalue: f64,
    /// Eigenfunction f on the nodes of the chart (boundary problem: on the boundary DOFs).
    pub eigenfunction: ScalarField,
    /// ‖Kx − λMx‖/‖x‖ of the discrete pencil for x = f/V.
    pub residual_norm: f64,
    /// ⟨f/V, 1⟩ in the mass of the problem after normalisation.
    pub kernel_overlap: f64,
    /// The discrete Rayleigh quotient at the returned eigenfunction.
    pub rayleigh: f64,
    /// Normalisation applied: ∫ V (f/V)² = 1 over M (closed) or ∂M (others).
    pub normalization: &'static str,
    /// β of the Wentzell problem.
    pub beta: Option<f64>,
}

/// Boundary DOF count up to which Steklov-type problems use the dense
/// Dirichlet-to-Neumann map.
pub const SCHUR_LIMIT: usize = 1200;

/// DOF count up to which the closed and boundary problems are solved densely.
pub const DENSE_LIMIT: usize = 1200;

fn finish(
    kind: ProblemKind,
    beta: Option<f64>,
    k: &Csr,
    mass: &[f64],
    v: &[f64],
    mut x: Vec<f64>,
    value: f64,
    sign_nodes: &[usize],
) -> EigResult {
    let norm = x.iter().zip(mass).map(|(a, w)| a * a * w).sum::<f64>().sqrt();
    x.iter_mut().for_each(|a| *a /= norm);
    let pivot = sign_nodes
        .iter()
        .copied()
        .fold(None::<usize>, |best, i| match best {
            Some(b) if x[b].abs() >= x[i].abs() => Some(b),
            _ => Some(i),
        });
    if let Some(p) = pivot {
        if x[p] < 0.0 {
            x.iter_mut().for_each(|a| *a = -*a);
        }
    }
    let residual_norm = eigen::pencil_residual(k, mass, value, &x);
    let kernel_overlap = x.iter().zip(mass).map(|(a, w)| a * w).sum();
    let rayleigh = k.quadratic(&x) / x.iter().zip(mass).map(|(a, w)| a * a * w).sum::<f64>();
    let f = x.iter().zip(v).map(|(u, v)| u * v).collect();
    EigResult {
        kind,
        eigenvalue: value,
        eigenfunction: ScalarField::from_values(f),
        residual_norm,
        kernel_overlap,
        rayleigh,
        normalization: if kind == ProblemKind::Closed { "volume" } else { "boundary" },
        beta,
    }
}

/// First nonzero η of Lf = −η f/V on a closed manifold.
pub fn eigen_closed(m: &ChartManifold) -> Result<EigResult> {
    if !m.domain().is_closed() {
        return Err(Error::NotClosed);
    }
    let op = assemble_operator(m)?;
    let mass = op.volume_mass();
    let ones = vec![1.0; op.len()];
    let pair = eigen::smallest_nonzero(&op.stiffness, &mass, &[ones], DENSE_LIMIT)?;
    let all: Vec<usize> = (0..op.len()).collect();
    Ok(finish(ProblemKind::Closed, None, &op.stiffness, &mass, &op.v, pair.vector, pair.value, &all))
}

/// First nonzero η of e^φ div(e^{−φ} V² ∇̄(z/V)) = −η z on ∂M.
pub fn eigen_boundary_weighted(m: &ChartManifold) -> Result<EigResult> {
    if !m.domain().has_boundary() {
        return Err(Error::NoBoundary);
    }
    let op = assemble_operator(m)?;
    eigen_boundary_from(&op)
}

fn eigen_boundary_from(op: &DiscreteOperator) -> Result<EigResult> {
    let nb = op.boundary_nodes.len();
    let kernel: Vec<Vec<f64>> = op
        .face_ranges
        .iter()
        .map(|r| (0..nb).map(|i| if r.contains(&i) { 1.0 } else { 0.0 }).collect())
        .collect();
    let pair = eigen::smallest_nonzero(&op.boundary_stiffness, &op.boundary_mass, &kernel, DENSE_LIMIT)?;
    let vb: Vec<f64> = op.trace(&op.v);
    let all: Vec<usize> = (0..nb).collect();
    Ok(finish(
        ProblemKind::Boundary,
        None,
        &op.boundary_stiffness,
        &op.boundary_mass,
        &vb,
        pair.vector,
        pair.value,
        &all,
    ))
}

/// Dense Dirichlet-to-Neumann map on the boundary DOFs and the interior
/// extension operator X with u_I = −X u_B.
struct DtnMap {
    dtn: Mat<f64>,
    extension: Vec<Vec<f64>>,
}

fn dtn_map(op: &DiscreteOperator) -> Result<DtnMap> {
    let b = &op.boundary_nodes;
    let i = &op.interior_nodes;
    let nb = b.len();
    let aii = op.stiffness.principal(i);
    let aib = op.stiffness.block(i, b);
    let mut cols = vec![vec![0.0; i.len()]; nb];
    for (r, c, v) in aib {
        cols[c][r] += v;
    }
    let extension = if i.is_empty() { cols.clone() } else { SpdFactor::new(&aii)?.solve_columns(&cols) };
    let abb = op.stiffness.principal(b);
    let mut dtn = Mat::from_fn(nb, nb, |r, c| abb.get(r, c));
    for c in 0..nb {
        for r in 0..nb {
            let s: f64 = cols[r].iter().zip(&extension[c]).map(|(a, x)| a * x).sum();
            dtn[(r, c)] -= s;
        }
    }
    Ok(DtnMap { dtn, extension })
}

/// Steklov (β = 0) or Wentzell eigenpair.
fn boundary_coupled(m: &ChartManifold, beta: f64, kind: ProblemKind) -> Result<EigResult> {
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::Unsupported(format!("beta = {beta}: only beta >= 0 is supported")));
    }
    if !m.domain().has_boundary() {
        return Err(Error::NoBoundary);
    }
    let op = assemble_operator(m)?;
    boundary_coupled_from(&op, beta, kind, None)
}

fn boundary_coupled_from(op: &DiscreteOperator, beta: f64, kind: ProblemKind, dtn: Option<&DtnMap>) -> Result<EigResult> {
    let nb = op.boundary_nodes.len();
    let full_k = op.stiffness.add(1.0, &op.full_boundary_stiffness(), beta);
    let full_b = op.full_boundary_mass();
    let ones = vec![1.0; op.len()];
    let beta_opt = (kind == ProblemKind::Wentzell).then_some(beta);
    let dense_ok = nb <= SCHUR_LIMIT && nb * op.interior_nodes.len() <= 40_000_000;
    let x = if dense_ok {
        let owned;
        let map = match dtn {
            Some(map) => map,
            None => {
                owned = dtn_map(op)?;
                &owned
            }
        };
        let mut k = map.dtn.clone();
        if beta != 0.0 {
            for (r, c, v) in op.boundary_stiffness.triplets() {
                k[(r, c)] += beta * v;
            }
        }
        let spectrum = eigen::dense_nonzero_spectrum(&k, &op.boundary_mass, &[vec![1.0; nb]])?;
        let (value, ub) = spectrum
            .into_iter()
            .next()
            .ok_or_else(|| Error::SolverDivergence("no nonzero eigenvalue".into()))?;
        let mut x = vec![0.0; op.len()];
        for (j, &node) in op.boundary_nodes.iter().enumerate() {
            x[node] = ub[j];
        }
        for (r, &node) in op.interior_nodes.iter().enumerate() {
            x[node] = -(0..nb).map(|c| map.extension[c][r] * ub[c]).sum::<f64>();
        }
        (value, x)
    } else {
        let pair = eigen::subspace_smallest_nonzero(&full_k, &full_b, &[ones], SubspaceOptions::default())?;
        (pair.value, pair.vector)
    };
    Ok(finish(kind, beta_opt, &full_k, &full_b, &op.v, x.1, x.0, &op.boundary_nodes))
}

/// First nonzero p of Lf = 0 in M, V(f/V)_ν = p f/V on ∂M.
pub fn eigen_steklov(m: &ChartManifold) -> Result<EigResult> {
    boundary_coupled(m, 0.0, ProblemKind::Steklov)
}

/// First nonzero λ of Lf = 0 in M, −β(Δ̄_φ f − (Δ̄_φV/V) f) + V(f/V)_ν = λ f/V on ∂M.
pub fn eigen_wentzell(m: &ChartManifold, beta: f64) -> Result<EigResult> {
    boundary_coupled(m, beta, ProblemKind::Wentzell)
}

/// Steklov, boundary and Wentzell eigenpairs for several β sharing one
/// assembly and one Dirichlet-to-Neumann map.
#[derive(Clone, Debug)]
pub struct BoundarySpectrum {
    pub steklov: EigResult,
    pub boundary: EigResult,
    pub wentzell: Vec<EigResult>,
}

pub fn boundary_spectrum(m: &ChartManifold, betas: &[f64]) -> Result<BoundarySpectrum> {
    if !m.domain().has_boundary() {
        return Err(Error::NoBoundary);
    }
    if let Some(&b) = betas.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
        return Err(Error::Unsupported(format!("beta = {b}: only beta >= 0 is supported")));
    }
    let op = assemble_operator(m)?;
    let map = if op.boundary_nodes.len() <= SCHUR_LIMIT { Some(dtn_map(&op)?) } else { None };
    let steklov = boundary_coupled_from(&op, 0.0, ProblemKind::Steklov, map.as_ref())?;
    let boundary = eigen_boundary_from(&op)?;
    let wentzell = betas
        .iter()
        .map(|&b| boundary_coupled_from(&op, b, ProblemKind::Wentzell, map.as_ref()))
        .collect::<Result<_>>()?;
    Ok(BoundarySpectrum { steklov, boundary, wentzell })
}

/// Relative residual ‖K u − b‖/‖b‖ above which a linear solve is rejected.
const SOLVE_TOLERANCE: f64 = 1e-9;

fn check_solve(k: &Csr, u: &[f64], b: &[f64]) -> Result<f64> {
    let r = k.matvec(u);
    let num: f64 = r.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let rel = num / den;
    if rel > SOLVE_TOLERANCE {
        return Err(Error::SolverDivergence(format!("linear solve residual {rel:e}")));
    }
    Ok(rel)
}

/// Solution of an auxiliary boundary-value problem.
#[derive(Clone, Debug)]
pub struct AuxiliarySolution {
    pub f: ScalarField,
    /// Relative residual of the discrete system.
    pub residual: f64,
    /// Neumann constant c (Neumann problem only).
    pub c: Option<f64>,
}

/// Lf = 1 in M, f = 0 on ∂M.
pub fn solve_dirichlet_unit(m: &ChartManifold) -> Result<AuxiliarySolution> {
    if !m.domain().has_boundary() {
        return Err(Error::NoBoundary);
    }
    let op = assemble_operator(m)?;
    let i = &op.interior_nodes;
    let kii = op.stiffness.principal(i);
    let rhs: Vec<f64> = i.iter().map(|&k| -op.v[k] * op.weight[k]).collect();
    let ui = SpdFactor::new(&kii)?.solve(&rhs);
    let residual = check_solve(&kii, &ui, &rhs)?;
    let mut f = vec![0.0; op.len()];
    for (r, &k) in i.iter().enumerate() {
        f[k] = ui[r] * op.v[k];
    }
    Ok(AuxiliarySolution { f: ScalarField::from_values(f), residual, c: None })
}

/// Lf = 1 in M, V(f/V)_ν = c on ∂M with c = ∫_M V dμ / ∫_{∂M} V dσ, fixed
/// by ∫ V (f/V) dμ = 0.
pub fn solve_neumann_const(m: &ChartManifold) -> Result<AuxiliarySolution> {
    solve_neumann(m, None)
}

/// As [`solve_neumann_const`] with an explicit boundary constant; data
/// violating the compatibility condition are rejected.
pub fn solve_neumann(m: &ChartManifold, c: Option<f64>) -> Result<AuxiliarySolution> {
    if !m.domain().has_boundary() {
        return Err(Error::NoBoundary);
    }
    let bg = boundary_geometry(m)?;
    let c_exact = neumann_constant(m, &bg);
    let c = c.unwrap_or(c_exact);
    let op = assemble_operator(m)?;
    let n = op.len();
    let vw: Vec<f64> = op.volume_mass();
    let mut rhs: Vec<f64> = vw.iter().map(|x| -x).collect();
    for (&k, &b) in op.boundary_nodes.iter().zip(&op.boundary_mass) {
        rhs[k] += c * b;
    }
    let total_v: f64 = vw.iter().sum();
    let defect: f64 = rhs.iter().sum::<f64>() / total_v;
    if defect.abs() > 1e-2 {
        return Err(Error::IncompatibleData { defect });
    }
    // Remove the O(h²) discrete compatibility defect proportionally to the volume source.
    for (r, x) in rhs.iter_mut().zip(&vw) {
        *r -= defect * x;
    }
    let keep: Vec<usize> = (1..n).collect();
    let k = op.stiffness.principal(&keep);
    let b: Vec<f64> = keep.iter().map(|&i| rhs[i]).collect();
    let sol = SpdFactor::new(&k)?.solve(&b);
    let mut u = vec![0.0; n];
    for (r, &i) in keep.iter().enumerate() {
        u[i] = sol[r];
    }
    let mean = u.iter().zip(&vw).map(|(a, w)| a * w).sum::<f64>() / total_v;
    u.iter_mut().for_each(|a| *a -= mean);
    let residual = check_solve(&op.stiffness, &u, &rhs)?;
    let f = u.iter().zip(&op.v).map(|(u, v)| u * v).collect();
    Ok(AuxiliarySolution { f: ScalarField::from_values(f), residual, c: Some(c) })
}

/// c = ∫_M V dμ / ∫_{∂M} V dσ.
pub fn neumann_constant(m: &ChartManifold, bg: &BoundaryGeometry) -> f64 {
    let vol = integrate_weighted_volume(m, m.v().values());
    let area = integrate_boundary(bg, &bg.restrict(m.v().values()));
    vol / area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::catalog::Geometry;
    use crate::chart::scalar_fn;

    #[test]
    fn constants_are_in_the_kernel() {
        let m = Geometry::FlatDisk
            .standard(1)
            .unwrap()
            .with_weights(scalar_fn(|p| 0.3 * p[0]), scalar_fn(|p| 1.0 + p[0] * p[0]))
            .unwrap();
        let op = assemble_operator(&m).unwrap();
        let lv = op.apply(m.v().values());
        assert!(lv.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn harmonic_function_at_interior_nodes() {
        let geo = Geometry::FlatDisk;
        let err = |level| {
            let m = geo.standard(level).unwrap();
            let op = assemble_operator(&m).unwrap();
            let f = m.sample(geo.cartesian_fn(1.0, |x| x[0])).unwrap();
            let lf = op.apply(f.values());
            op.interior_nodes
                .iter()
                .filter(|&&k| m.domain().point(k)[0] > 0.25)
                .map(|&k| lf[k].abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(1), err(2));
        assert!(b < a / 3.5, "{a} {b}");
    }

    #[test]
    fn disk_spectra() {
        let m = Geometry::FlatDisk.standard(2).unwrap();
        let s = boundary_spectrum(&m, &[0.0, 1.0]).unwrap();
        assert!((s.steklov.eigenvalue - 1.0).abs() < 5e-3, "{}", s.steklov.eigenvalue);
        assert!((s.boundary.eigenvalue - 1.0).abs() < 1e-3, "{}", s.boundary.eigenvalue);
        assert!((s.wentzell[1].eigenvalue - 2.0).abs() < 1e-2, "{}", s.wentzell[1].eigenvalue);
        assert!((s.wentzell[0].eigenvalue - s.steklov.eigenvalue).abs() < 1e-10);
        assert!(s.steklov.residual_norm < 1e-8 && s.steklov.kernel_overlap.abs() < 1e-10);
    }

    #[test]
    fn torus_and_sphere_closed_spectra() {
        let m = Geometry::FlatTorus2.standard(1).unwrap();
        let e = eigen_closed(&m).unwrap();
        assert!((e.eigenvalue - 1.0).abs() < 1e-2, "{}", e.eigenvalue);
        let m = Geometry::RoundSphere2.standard(2).unwrap();
        let e = eigen_closed(&m).unwrap();
        assert!((e.eigenvalue - 2.0).abs() < 1e-2, "{}", e.eigenvalue);
        assert!(e.residual_norm < 1e-8);
    }

    #[test]
    fn dirichlet_and_neumann_on_disk() {
        let m = Geometry::FlatDisk.standard(2).unwrap();
        let d = solve_dirichlet_unit(&m).unwrap();
        let centre = d.f.value(0);
        assert!((centre + 0.25).abs() < 1e-2, "{centre}");
        let bg = boundary_geometry(&m).unwrap();
        assert!((neumann_constant(&m, &bg) - 0.5).abs() < 1e-6);
        assert!(solve_neumann_const(&m).is_ok());
        assert!(matches!(solve_neumann(&m, Some(1.0)), Err(Error::IncompatibleData { .. })));
    }
}
