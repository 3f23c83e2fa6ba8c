//! Geometry of ∂M on coordinate faces: normal, induced metric, second
//! fundamental form, mean curvatures and tangential operators.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::calculus::{christoffel, gradient_components, max_operator_norm, min_generalized_eigenvalue, Differential};
use crate::chart::{ChartManifold, FaceId, ScalarField, Side};
use crate::error::{Error, Result};
use crate::tensor::TensorField;

/// Geometry of one boundary face. Per-node arrays are indexed like `nodes`.
#[derive(Clone, Debug)]
pub struct FaceGeometry {
    pub face: FaceId,
    /// Volume indices of the face nodes, in the order of the face grid.
    pub nodes: Vec<usize>,
    /// The face as a manifold: induced metric ḡ and the restrictions of φ and V.
    pub chart: ChartManifold,
    /// Volume axis of every face axis.
    pub tangential: Vec<usize>,
    /// Outward unit normal ν^i, indexed `[i][k]`.
    pub nu: Vec<Vec<f64>>,
    /// Its covariant components ν_i.
    pub nu_lower: Vec<Vec<f64>>,
    /// II_αβ = g(∇_α ν, ∂_β).
    pub second_fundamental_form: TensorField,
    /// H = ḡ^αβ II_αβ.
    pub mean_curvature: Vec<f64>,
    /// H_φ = H − φ_ν.
    pub h_phi: Vec<f64>,
    /// II^V = II − (V_ν/V) ḡ.
    pub ii_v: TensorField,
    /// φ_ν.
    pub phi_nu: Vec<f64>,
    /// V_ν.
    pub v_nu: Vec<f64>,
}

impl FaceGeometry {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// √det ḡ at every face node.
    pub fn area_element(&self) -> &[f64] {
        self.chart.metric().sqrt_det()
    }

    pub fn gbar(&self) -> &TensorField {
        self.chart.metric().g()
    }
}

/// Geometry of every boundary face of a chart manifold.
#[derive(Clone, Debug)]
pub struct BoundaryGeometry {
    pub faces: Vec<FaceGeometry>,
}

impl BoundaryGeometry {
    /// Restrict volume values to every face.
    pub fn restrict(&self, values: &[f64]) -> Vec<Vec<f64>> {
        self.faces.iter().map(|f| f.nodes.iter().map(|&k| values[k]).collect()).collect()
    }

    /// Total number of boundary nodes.
    pub fn node_count(&self) -> usize {
        self.faces.iter().map(FaceGeometry::len).sum()
    }

    /// Normal derivative f_ν = ν^i ∂_i f on every face.
    pub fn normal_derivative(&self, m: &ChartManifold, f: &ScalarField) -> Result<Vec<Vec<f64>>> {
        let grad = gradient_components(m, f)?;
        Ok(self.normal_component(&grad))
    }

    /// ν^i X_i on every face for a covector field given by components.
    pub fn normal_component(&self, covector: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.faces
            .iter()
            .map(|face| {
                face.nodes
                    .iter()
                    .enumerate()
                    .map(|(k, &node)| (0..covector.len()).map(|i| face.nu[i][k] * covector[i][node]).sum())
                    .collect()
            })
            .collect()
    }

    /// Largest ḡ-operator norm of II − (H/(n−1)) ḡ over all faces.
    pub fn umbilicity_defect(&self) -> f64 {
        self.faces
            .iter()
            .map(|face| {
                let k = face.chart.dim() as f64;
                let g = face.gbar();
                let t = TensorField::symmetric_from_fn(face.chart.dim(), face.len(), |node| {
                    face.second_fundamental_form.matrix_at(node) - g.matrix_at(node) * (face.mean_curvature[node] / k)
                });
                max_operator_norm(&face.chart, &t)
            })
            .fold(0.0, f64::max)
    }

    /// max H − min H over the boundary.
    pub fn mean_curvature_spread(&self) -> f64 {
        let all = self.faces.iter().flat_map(|f| f.mean_curvature.iter().copied());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), h| (lo.min(h), hi.max(h)));
        hi - lo
    }
}

/// Normal, induced metric, II, H, H_φ and II^V on every boundary face.
pub fn boundary_geometry(m: &ChartManifold) -> Result<BoundaryGeometry> {
    let faces = m.boundary_faces();
    if faces.is_empty() {
        return Err(Error::NoBoundary);
    }
    let gamma = christoffel(m)?;
    let dphi = gradient_components(m, m.phi())?;
    let dv = gradient_components(m, m.v())?;
    let faces = faces
        .into_iter()
        .map(|face| face_geometry(m, &gamma, &dphi, &dv, face))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryGeometry { faces })
}

fn face_geometry(
    m: &ChartManifold,
    gamma: &TensorField,
    dphi: &[Vec<f64>],
    dv: &[Vec<f64>],
    face: FaceId,
) -> Result<FaceGeometry> {
    let n = m.dim();
    let a = face.axis;
    let s = match face.side {
        Side::Low => -1.0,
        Side::High => 1.0,
    };
    let domain = m.domain().face_domain(face)?;
    let nodes = m.domain().face_nodes(face);
    let tangential: Vec<usize> = (0..n).filter(|&b| b != a).collect();
    let k = nodes.len();
    let g = m.metric().g();
    let ginv = m.metric().inverse();

    let gbar = TensorField::symmetric_from_fn(n - 1, k, |j| {
        DMatrix::from_fn(n - 1, n - 1, |x, y| g.get(nodes[j], &[tangential[x], tangential[y]]))
    });
    let chart = ChartManifold::from_samples(domain, gbar, m.phi().restrict(&nodes), m.v().restrict(&nodes))?
        .with_stencil_order(m.stencil_order());

    let mut nu = vec![vec![0.0; k]; n];
    let mut nu_lower = vec![vec![0.0; k]; n];
    for (j, &node) in nodes.iter().enumerate() {
        let scale = ginv.get(node, &[a, a]).sqrt();
        nu_lower[a][j] = s / scale;
        for (i, row) in nu.iter_mut().enumerate() {
            row[j] = ginv.get(node, &[i, a]) * s / scale;
        }
    }
    let second_fundamental_form = TensorField::symmetric_from_fn(n - 1, k, |j| {
        DMatrix::from_fn(n - 1, n - 1, |x, y| -nu_lower[a][j] * gamma.get(nodes[j], &[a, tangential[x], tangential[y]]))
    });
    let dot = |field: &[Vec<f64>], j: usize| (0..n).map(|i| nu[i][j] * field[i][nodes[j]]).sum::<f64>();
    let phi_nu: Vec<f64> = (0..k).map(|j| dot(dphi, j)).collect();
    let v_nu: Vec<f64> = (0..k).map(|j| dot(dv, j)).collect();
    let gb = chart.metric();
    let mean_curvature: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|j| gb.inverse_at(j).component_mul(&second_fundamental_form.matrix_at(j)).sum())
        .collect();
    let h_phi = mean_curvature.iter().zip(&phi_nu).map(|(h, p)| h - p).collect();
    let v = chart.v().values();
    let ii_v = TensorField::symmetric_from_fn(n - 1, k, |j| {
        second_fundamental_form.matrix_at(j) - gb.matrix_at(j) * (v_nu[j] / v[j])
    });
    Ok(FaceGeometry {
        face,
        nodes,
        chart,
        tangential,
        nu,
        nu_lower,
        second_fundamental_form,
        mean_curvature,
        h_phi,
        ii_v,
        phi_nu,
        v_nu,
    })
}

/// Tangential gradient components ∂_α f and Δ̄_φ f on one face.
#[derive(Clone, Debug)]
pub struct TangentialOperators {
    pub grad_bar: Vec<Vec<f64>>,
    pub lap_phi_bar: Vec<f64>,
}

/// Tangential gradient and weighted Laplacian of the trace of `f` on every face.
pub fn boundary_operators(bg: &BoundaryGeometry, f: &ScalarField) -> Result<Vec<TangentialOperators>> {
    bg.faces
        .iter()
        .map(|face| {
            let trace = f.restrict(&face.nodes);
            let h = Differential::new(&face.chart)?.hessian(&trace)?;
            Ok(TangentialOperators { grad_bar: h.grad, lap_phi_bar: h.lap_phi.into_values() })
        })
        .collect()
}

/// The constants c₁ = min of the smallest ḡ-eigenvalue of V·II^V and c₂ = min H_φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisConstants {
    pub c1: f64,
    /// Volume node attaining c₁.
    pub c1_node: usize,
    pub c2: f64,
    /// Volume node attaining c₂.
    pub c2_node: usize,
}

pub fn hypothesis_constants(bg: &BoundaryGeometry) -> HypothesisConstants {
    let mut out = HypothesisConstants { c1: f64::INFINITY, c1_node: 0, c2: f64::INFINITY, c2_node: 0 };
    for face in &bg.faces {
        let v = face.chart.v().values();
        let g = face.gbar();
        for j in 0..face.len() {
            let e = min_generalized_eigenvalue(&(face.ii_v.matrix_at(j) * v[j]), &g.matrix_at(j));
            if e < out.c1 {
                out.c1 = e;
                out.c1_node = face.nodes[j];
            }
            if face.h_phi[j] < out.c2 {
                out.c2 = face.h_phi[j];
                out.c2_node = face.nodes[j];
            }
        }
    }
    out
}
