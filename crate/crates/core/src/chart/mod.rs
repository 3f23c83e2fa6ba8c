//! Chart manifolds: a coordinate box with a tensor-product grid, a metric, a
//! weight φ and a positive potential V.
//!
//! Axes are periodic or bounded intervals. Each end of a bounded axis is
//! either a boundary face of the manifold or a coordinate pole (the centre of
//! polar coordinates, the poles of spherical coordinates). Grids are offset by
//! half a spacing at poles so no node sits on a singular locus, and values
//! beyond a pole are read from the antipodal node through the pole map.

pub mod catalog;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{pair_count, pair_index, per_node, TensorField};

/// Scalar evaluator on chart coordinates.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Metric evaluator on chart coordinates.
pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Wrap a closure as a [`ScalarFn`].
pub fn scalar_fn<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

/// Wrap a closure as a [`MetricFn`].
pub fn metric_fn<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static>(f: F) -> MetricFn {
    Arc::new(f)
}

/// How the chart continues through a coordinate pole.
///
/// Crossing the pole on axis `a` lands on the node with the same distance to
/// the pole, with every axis in `mirrored` reflected about its midpoint and
/// every periodic axis in `shifted` moved by half a period. The volume
/// element vanishes like `dist^order` at the pole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleMap {
    pub mirrored: Vec<usize>,
    pub shifted: Vec<usize>,
    pub order: u32,
}

/// One end of a bounded axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Face {
    Boundary,
    Pole(PoleMap),
}

impl Face {
    pub fn is_pole(&self) -> bool {
        matches!(self, Face::Pole(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxisKind {
    Periodic,
    Interval { low: Face, high: Face },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Low,
    High,
}

/// A boundary face: the set of nodes at one end of a bounded axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub axis: usize,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub resolution: usize,
    pub kind: AxisKind,
}

impl Axis {
    pub fn periodic(name: &str, lower: f64, upper: f64, resolution: usize) -> Self {
        Self { name: name.into(), lower, upper, resolution, kind: AxisKind::Periodic }
    }

    pub fn interval(name: &str, lower: f64, upper: f64, resolution: usize, low: Face, high: Face) -> Self {
        Self { name: name.into(), lower, upper, resolution, kind: AxisKind::Interval { low, high } }
    }

    /// Interval whose two ends are boundary faces.
    pub fn bounded(name: &str, lower: f64, upper: f64, resolution: usize) -> Self {
        Self::interval(name, lower, upper, resolution, Face::Boundary, Face::Boundary)
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, AxisKind::Periodic)
    }

    pub fn face(&self, side: Side) -> Option<&Face> {
        match &self.kind {
            AxisKind::Periodic => None,
            AxisKind::Interval { low, high } => Some(match side {
                Side::Low => low,
                Side::High => high,
            }),
        }
    }

    fn pole_count(&self) -> usize {
        [Side::Low, Side::High]
            .iter()
            .filter(|&&s| self.face(s).is_some_and(Face::is_pole))
            .count()
    }

    /// Grid spacing.
    pub fn spacing(&self) -> f64 {
        let len = self.upper - self.lower;
        match self.kind {
            AxisKind::Periodic => len / self.resolution as f64,
            AxisKind::Interval { .. } => {
                len / ((self.resolution - 1) as f64 + 0.5 * self.pole_count() as f64)
            }
        }
    }

    /// Coordinate of grid index `j`; indices outside `0..resolution` give the
    /// positions of ghost nodes.
    pub fn coordinate(&self, j: isize) -> f64 {
        let h = self.spacing();
        let offset = if self.face(Side::Low).is_some_and(Face::is_pole) { 0.5 * h } else { 0.0 };
        self.lower + offset + j as f64 * h
    }

    /// Width of the dual cell around node `j`: half a spacing at boundary
    /// faces, a full spacing elsewhere (the cell next to a pole reaches the pole).
    pub fn cell_width(&self, j: usize) -> f64 {
        let h = self.spacing();
        let at_boundary = (j == 0 && self.face(Side::Low) == Some(&Face::Boundary))
            || (j + 1 == self.resolution && self.face(Side::High) == Some(&Face::Boundary));
        if at_boundary {
            0.5 * h
        } else {
            h
        }
    }
}

/// The coordinate box and its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamDomain {
    axes: Vec<Axis>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl ParamDomain {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        let dim = axes.len();
        if dim == 0 || dim > 16 {
            return Err(Error::InvalidDomain(format!("unsupported dimension {dim}")));
        }
        for (a, ax) in axes.iter().enumerate() {
            if !(ax.lower.is_finite() && ax.upper.is_finite() && ax.lower < ax.upper) {
                return Err(Error::InvalidDomain(format!("axis {a} needs lower < upper")));
            }
            if ax.resolution < 8 {
                return Err(Error::InvalidDomain(format!("axis {a} needs at least 8 points")));
            }
            if let AxisKind::Interval { low, high } = &ax.kind {
                if ax.resolution % 2 == 0 {
                    return Err(Error::InvalidDomain(format!(
                        "bounded axis {a} needs an odd number of points"
                    )));
                }
                for face in [low, high] {
                    if let Face::Pole(map) = face {
                        for &b in &map.mirrored {
                            let ok = b != a
                                && b < dim
                                && match &axes[b].kind {
                                    AxisKind::Interval { low, high } => low.is_pole() == high.is_pole(),
                                    AxisKind::Periodic => false,
                                };
                            if !ok {
                                return Err(Error::InvalidDomain(format!(
                                    "pole of axis {a} mirrors axis {b}, which is not a symmetric interval"
                                )));
                            }
                        }
                        for &b in &map.shifted {
                            let ok = b != a
                                && b < dim
                                && axes[b].is_periodic()
                                && axes[b].resolution.is_multiple_of(2);
                            if !ok {
                                return Err(Error::InvalidDomain(format!(
                                    "pole of axis {a} shifts axis {b}, which is not periodic with an even count"
                                )));
                            }
                        }
                    }
                }
            }
        }
        let shape: Vec<usize> = axes.iter().map(|a| a.resolution).collect();
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        let len = shape.iter().product();
        Ok(Self { axes, shape, strides, len })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn stride(&self, a: usize) -> usize {
        self.strides[a]
    }

    pub fn spacing(&self, a: usize) -> f64 {
        self.axes[a].spacing()
    }

    /// Largest grid spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim()];
        self.multi_index_into(node, &mut m);
        m
    }

    pub fn multi_index_into(&self, node: usize, out: &mut [usize]) {
        for a in 0..self.dim() {
            out[a] = (node / self.strides[a]) % self.shape[a];
        }
    }

    /// Coordinates of a node.
    pub fn point(&self, node: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.axes[a].coordinate(((node / self.strides[a]) % self.shape[a]) as isize))
            .collect()
    }

    /// Grid index of `node` along axis `a`.
    pub fn coord_index(&self, node: usize, a: usize) -> usize {
        (node / self.strides[a]) % self.shape[a]
    }

    pub fn boundary_faces(&self) -> Vec<FaceId> {
        let mut faces = Vec::new();
        for (a, ax) in self.axes.iter().enumerate() {
            for side in [Side::Low, Side::High] {
                if ax.face(side) == Some(&Face::Boundary) {
                    faces.push(FaceId { axis: a, side });
                }
            }
        }
        faces
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary_faces().is_empty()
    }

    pub fn is_closed(&self) -> bool {
        !self.has_boundary()
    }

    /// Whether boundary faces of two different axes meet.
    pub fn has_corners(&self) -> bool {
        let faces = self.boundary_faces();
        faces.iter().any(|f| faces.iter().any(|g| g.axis != f.axis))
    }

    /// Whether a node lies on some boundary face.
    pub fn on_boundary(&self, node: usize) -> bool {
        self.boundary_faces().iter().any(|f| self.on_face(node, *f))
    }

    pub fn on_face(&self, node: usize, face: FaceId) -> bool {
        let j = self.coord_index(node, face.axis);
        match face.side {
            Side::Low => j == 0,
            Side::High => j + 1 == self.shape[face.axis],
        }
    }

    /// Nodes of a face, ordered like the grid of [`ParamDomain::face_domain`].
    pub fn face_nodes(&self, face: FaceId) -> Vec<usize> {
        let j = match face.side {
            Side::Low => 0,
            Side::High => self.shape[face.axis] - 1,
        };
        (0..self.len)
            .filter(|&node| self.coord_index(node, face.axis) == j)
            .collect()
    }

    /// The grid of a face, with the face axis removed.
    pub fn face_domain(&self, face: FaceId) -> Result<ParamDomain> {
        let a = face.axis;
        let renumber = |list: &[usize]| -> Result<Vec<usize>> {
            list.iter()
                .map(|&b| match b.cmp(&a) {
                    std::cmp::Ordering::Less => Ok(b),
                    std::cmp::Ordering::Greater => Ok(b - 1),
                    std::cmp::Ordering::Equal => Err(Error::InvalidDomain(
                        "a pole map moves the face axis".into(),
                    )),
                })
                .collect()
        };
        let fix = |f: &Face| -> Result<Face> {
            Ok(match f {
                Face::Boundary => Face::Boundary,
                Face::Pole(m) => Face::Pole(PoleMap {
                    mirrored: renumber(&m.mirrored)?,
                    shifted: renumber(&m.shifted)?,
                    order: m.order,
                }),
            })
        };
        let mut axes = Vec::new();
        for (b, ax) in self.axes.iter().enumerate() {
            if b == a {
                continue;
            }
            let kind = match &ax.kind {
                AxisKind::Periodic => AxisKind::Periodic,
                AxisKind::Interval { low, high } => AxisKind::Interval { low: fix(low)?, high: fix(high)? },
            };
            axes.push(Axis { kind, ..ax.clone() });
        }
        ParamDomain::new(axes)
    }

    /// Apply the pole map of `map` (a pole of axis `axis`) to a multi-index,
    /// leaving the pole axis itself untouched.
    pub(crate) fn apply_pole_map(&self, map: &PoleMap, multi: &mut [usize]) {
        for &b in &map.mirrored {
            multi[b] = self.shape[b] - 1 - multi[b];
        }
        for &b in &map.shifted {
            multi[b] = (multi[b] + self.shape[b] / 2) % self.shape[b];
        }
    }

    /// Axes whose orientation is reversed when crossing the pole.
    pub(crate) fn reversed_mask(axis: usize, map: &PoleMap) -> u32 {
        map.mirrored.iter().fold(1 << axis, |m, &b| m | (1 << b))
    }

    /// Parity of densities such as √det g: one bit for every axis.
    pub fn density_parity(&self) -> u32 {
        (1u32 << self.dim()) - 1
    }

    /// Finite-volume cell measure in coordinate space around a node.
    pub fn cell_measure(&self, node: usize) -> f64 {
        (0..self.dim())
            .map(|a| self.axes[a].cell_width(self.coord_index(node, a)))
            .product()
    }
}

/// A scalar function sampled on the grid.
///
/// `parity` records how the function changes sign when read across a pole:
/// bit `a` is set when the sampled quantity is odd under reversal of axis `a`.
/// Plain scalars have parity 0.
#[derive(Clone)]
pub struct ScalarField {
    values: Vec<f64>,
    parity: u32,
    analytic: Option<ScalarFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("len", &self.values.len())
            .field("parity", &self.parity)
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values, parity: 0, analytic: None }
    }

    pub fn with_parity(mut self, parity: u32) -> Self {
        self.parity = parity;
        self
    }

    /// Sample an evaluator at every node and keep it for later oracle use.
    pub fn sample(domain: &ParamDomain, f: ScalarFn) -> Result<Self> {
        let values: Vec<f64> = (0..domain.len())
            .into_par_iter()
            .map(|node| f(&domain.point(node)))
            .collect();
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField { node });
        }
        Ok(Self { values, parity: 0, analytic: Some(f) })
    }

    pub fn constant(domain: &ParamDomain, c: f64) -> Self {
        Self {
            values: vec![c; domain.len()],
            parity: 0,
            analytic: Some(Arc::new(move |_: &[f64]| c)),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn parity(&self) -> u32 {
        self.parity
    }

    pub fn analytic(&self) -> Option<&ScalarFn> {
        self.analytic.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Re-evaluate the analytic form on a grid.
    pub fn resample(&self, domain: &ParamDomain) -> Option<Vec<f64>> {
        let f = self.analytic.as_ref()?;
        Some((0..domain.len()).map(|node| f(&domain.point(node))).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values at a subset of nodes.
    pub fn restrict(&self, nodes: &[usize]) -> ScalarField {
        ScalarField::from_values(nodes.iter().map(|&n| self.values[n]).collect())
    }
}

/// Symmetric positive-definite metric with cached inverse and volume element.
#[derive(Clone, Debug)]
pub struct MetricField {
    g: TensorField,
    inverse: TensorField,
    sqrt_det: Vec<f64>,
}

impl MetricField {
    pub fn new(g: TensorField) -> Result<Self> {
        assert!(g.valence() == (0, 2) && g.is_symmetric(), "metric must be a symmetric (0,2) field");
        let n = g.dim();
        let len = g.len();
        let np = pair_count(n);
        let results: Vec<Option<(Vec<f64>, f64)>> = (0..len)
            .into_par_iter()
            .map(|node| {
                let m = g.matrix_at(node);
                let chol = m.cholesky()?;
                let det_sqrt: f64 = chol.l_dirty().diagonal().iter().product();
                if !(det_sqrt.is_finite() && det_sqrt > 0.0) {
                    return None;
                }
                let inv = chol.inverse();
                let mut packed = vec![0.0; np];
                for i in 0..n {
                    for j in i..n {
                        packed[pair_index(n, i, j)] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                    }
                }
                Some((packed, det_sqrt))
            })
            .collect();
        let mut inv_comps = vec![vec![0.0; len]; np];
        let mut sqrt_det = vec![0.0; len];
        for (node, r) in results.into_iter().enumerate() {
            let (packed, d) = r.ok_or(Error::DegenerateMetric { node })?;
            for (c, v) in packed.into_iter().enumerate() {
                inv_comps[c][node] = v;
            }
            sqrt_det[node] = d;
        }
        let inverse = TensorField::from_components(n, 0, 2, true, inv_comps);
        Ok(Self { g, inverse, sqrt_det })
    }

    /// Components g_ij.
    pub fn g(&self) -> &TensorField {
        &self.g
    }

    /// Components g^ij (stored as a symmetric pair field).
    pub fn inverse(&self) -> &TensorField {
        &self.inverse
    }

    pub fn sqrt_det(&self) -> &[f64] {
        &self.sqrt_det
    }

    pub fn matrix_at(&self, node: usize) -> DMatrix<f64> {
        self.g.matrix_at(node)
    }

    pub fn inverse_at(&self, node: usize) -> DMatrix<f64> {
        self.inverse.matrix_at(node)
    }

    /// Maximum over nodes of ‖g·g⁻¹ − I‖_max.
    pub fn identity_defect(&self) -> f64 {
        let n = self.g.dim();
        (0..self.g.len())
            .into_par_iter()
            .map(|node| (self.matrix_at(node) * self.inverse_at(node) - DMatrix::identity(n, n)).abs().max())
            .reduce(|| 0.0, f64::max)
    }
}

/// A compact manifold (possibly with boundary) described by one chart.
#[derive(Clone, Debug)]
pub struct ChartManifold {
    domain: ParamDomain,
    metric: MetricField,
    phi: ScalarField,
    v: ScalarField,
    stencil_order: usize,
}

/// Sample metric, weight and potential on the grid and validate them.
pub fn build_chart_manifold(
    domain: ParamDomain,
    metric_eval: MetricFn,
    phi_eval: ScalarFn,
    v_eval: ScalarFn,
) -> Result<ChartManifold> {
    if domain.dim() < 2 {
        return Err(Error::InvalidDomain("a chart manifold needs dimension at least 2".into()));
    }
    let n = domain.dim();
    let comps = per_node(domain.len(), pair_count(n), |node, out| {
        let m = metric_eval(&domain.point(node));
        for i in 0..n {
            for j in i..n {
                out[pair_index(n, i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
    });
    if let Some(node) = (0..domain.len()).find(|&node| comps.iter().any(|c| !c[node].is_finite())) {
        return Err(Error::DegenerateMetric { node });
    }
    let g = TensorField::from_components(n, 0, 2, true, comps);
    let phi = ScalarField::sample(&domain, phi_eval)?;
    let v = ScalarField::sample(&domain, v_eval)?;
    ChartManifold::from_samples(domain, g, phi, v)
}

impl ChartManifold {
    /// Assemble a manifold from sampled metric, weight and potential.
    pub fn from_samples(domain: ParamDomain, g: TensorField, phi: ScalarField, v: ScalarField) -> Result<Self> {
        let len = domain.len();
        assert_eq!(g.len(), len, "metric sampled on a different grid");
        assert_eq!(phi.len(), len, "phi sampled on a different grid");
        assert_eq!(v.len(), len, "V sampled on a different grid");
        for field in [&phi, &v] {
            if let Some(node) = field.values().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteField { node });
            }
        }
        let (node, min) = v
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
        if min <= 0.0 {
            return Err(Error::NonPositivePotential { min, node });
        }
        let metric = MetricField::new(g)?;
        Ok(Self { domain, metric, phi, v, stencil_order: 4 })
    }

    /// Use finite-difference stencils of the given (even) accuracy order.
    pub fn with_stencil_order(mut self, order: usize) -> Self {
        assert!(matches!(order, 2 | 4 | 6 | 8), "stencil order must be 2, 4, 6 or 8");
        self.stencil_order = order;
        self
    }

    /// Same geometry with a different weight and potential.
    pub fn with_weights(&self, phi_eval: ScalarFn, v_eval: ScalarFn) -> Result<Self> {
        let phi = ScalarField::sample(&self.domain, phi_eval)?;
        let v = ScalarField::sample(&self.domain, v_eval)?;
        self.with_weight_fields(phi, v)
    }

    pub fn with_weight_fields(&self, phi: ScalarField, v: ScalarField) -> Result<Self> {
        let m = Self::from_samples(self.domain.clone(), self.metric.g.clone(), phi, v)?;
        Ok(m.with_stencil_order(self.stencil_order))
    }

    pub fn domain(&self) -> &ParamDomain {
        &self.domain
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn v(&self) -> &ScalarField {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn stencil_order(&self) -> usize {
        self.stencil_order
    }

    pub fn boundary_faces(&self) -> Vec<FaceId> {
        self.domain.boundary_faces()
    }

    /// √det g at a node.
    pub fn volume_element(&self, node: usize) -> f64 {
        self.metric.sqrt_det[node]
    }

    /// Sample an evaluator on this grid.
    pub fn sample(&self, f: ScalarFn) -> Result<ScalarField> {
        ScalarField::sample(&self.domain, f)
    }

    /// Whether φ is numerically constant: max φ − min φ < 1e−10·(1 + max|φ|).
    pub fn phi_is_constant(&self) -> bool {
        self.phi.max() - self.phi.min() < 1e-10 * (1.0 + self.phi.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar(nr: usize, nt: usize) -> ParamDomain {
        let pole = Face::Pole(PoleMap { mirrored: vec![], shifted: vec![1], order: 1 });
        ParamDomain::new(vec![
            Axis::interval("r", 0.0, 1.0, nr, pole, Face::Boundary),
            Axis::periodic("theta", 0.0, std::f64::consts::TAU, nt),
        ])
        .unwrap()
    }

    #[test]
    fn pole_grid_is_offset_by_half_a_spacing() {
        let d = polar(9, 16);
        let ax = d.axis(0);
        let h = ax.spacing();
        assert!((ax.coordinate(0) - h / 2.0).abs() < 1e-15);
        assert!((ax.coordinate(8) - 1.0).abs() < 1e-14);
        assert!((ax.coordinate(-1) + h / 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_metric_square() {
        let d = ParamDomain::new(vec![Axis::bounded("x", 0.0, 1.0, 9), Axis::bounded("y", 0.0, 1.0, 9)]).unwrap();
        let m = build_chart_manifold(
            d,
            metric_fn(|_| DMatrix::identity(2, 2)),
            scalar_fn(|_| 0.0),
            scalar_fn(|_| 1.0),
        )
        .unwrap();
        assert!((0..m.len()).all(|n| m.volume_element(n) == 1.0));
        assert!(m.metric().identity_defect() < 1e-12);
        assert!(m.domain().has_corners());
    }

    #[test]
    fn polar_volume_element_is_r() {
        let d = polar(9, 16);
        let m = build_chart_manifold(
            d,
            metric_fn(|x| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, x[0] * x[0]]))),
            scalar_fn(|_| 0.0),
            scalar_fn(|_| 1.0),
        )
        .unwrap();
        for node in 0..m.len() {
            let r = m.domain().point(node)[0];
            assert!((m.volume_element(node) - r).abs() < 1e-15);
        }
        assert!(!m.domain().has_corners());
        assert_eq!(m.boundary_faces(), vec![FaceId { axis: 0, side: Side::High }]);
    }

    #[test]
    fn negative_potential_is_rejected() {
        let d = ParamDomain::new(vec![Axis::bounded("x", 0.0, 1.0, 9), Axis::bounded("y", 0.0, 1.0, 9)]).unwrap();
        let r = build_chart_manifold(
            d,
            metric_fn(|_| DMatrix::identity(2, 2)),
            scalar_fn(|_| 0.0),
            scalar_fn(|x| x[0] - 2.0),
        );
        assert!(matches!(r, Err(Error::NonPositivePotential { .. })));
    }

    #[test]
    fn degenerate_metric_reports_node() {
        let d = ParamDomain::new(vec![Axis::bounded("x", 0.0, 1.0, 9), Axis::bounded("y", 0.0, 1.0, 9)]).unwrap();
        let r = build_chart_manifold(
            d,
            metric_fn(|x| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0] - 0.5])),
            scalar_fn(|_| 0.0),
            scalar_fn(|_| 1.0),
        );
        assert!(matches!(r, Err(Error::DegenerateMetric { node: 0 })));
    }

    #[test]
    fn even_bounded_axis_is_rejected() {
        assert!(ParamDomain::new(vec![Axis::bounded("x", 0.0, 1.0, 8), Axis::periodic("y", 0.0, 1.0, 8)]).is_err());
        assert!(ParamDomain::new(vec![Axis::bounded("x", 0.0, 1.0, 9), Axis::periodic("y", 0.0, 1.0, 7)]).is_err());
    }

    #[test]
    fn resampling_is_bit_exact() {
        let d = polar(9, 16);
        let f = ScalarField::sample(&d, scalar_fn(|x| x[0].sin() * x[1].cos())).unwrap();
        assert_eq!(f.resample(&d).unwrap(), f.values());
    }

    #[test]
    fn face_domain_drops_the_axis() {
        let d = polar(9, 16);
        let face = FaceId { axis: 0, side: Side::High };
        let fd = d.face_domain(face).unwrap();
        assert_eq!(fd.dim(), 1);
        let nodes = d.face_nodes(face);
        assert_eq!(nodes.len(), 16);
        for (k, &node) in nodes.iter().enumerate() {
            assert_eq!(d.point(node)[1], fd.point(k)[0]);
        }
    }
}
