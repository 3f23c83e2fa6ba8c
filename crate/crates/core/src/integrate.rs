//! Weighted quadrature over M and ∂M, and convergence-order estimation.

use crate::boundary::BoundaryGeometry;
use crate::calculus::Differential;
use crate::chart::{Axis, AxisKind, ChartManifold, Face, ParamDomain};
use crate::error::{Error, Result};

/// Sum in a fixed pairwise order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Weights `(w0, w1)` with `∫_0^ε r^p F(r) dr ≈ ε (w0 G(ε) + w1 G(3ε))` for
/// `G = r^p F` and `F` even; exact when `F` is a quadratic.
pub fn core_weights(order: u32) -> (f64, f64) {
    let p = order as f64;
    let a = 3f64.powf(p);
    let b = 3f64.powf(p + 2.0);
    let w1 = (1.0 / (p + 1.0) - 1.0 / (p + 3.0)) / (a - b);
    let w0 = 1.0 / (p + 1.0) - a * w1;
    (w0, w1)
}

/// One-dimensional quadrature weights of an axis: periodic trapezoid,
/// composite Simpson between the first and last node of an interval, plus
/// the excluded half-cell at each pole.
pub fn axis_weights(axis: &Axis) -> Vec<f64> {
    let n = axis.resolution;
    let h = axis.spacing();
    match &axis.kind {
        AxisKind::Periodic => vec![h; n],
        AxisKind::Interval { low, high } => {
            let mut w: Vec<f64> = (0..n)
                .map(|j| {
                    let c = if j == 0 || j + 1 == n {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect();
            let eps = 0.5 * h;
            if let Face::Pole(map) = low {
                let (w0, w1) = core_weights(map.order);
                w[0] += eps * w0;
                w[1] += eps * w1;
            }
            if let Face::Pole(map) = high {
                let (w0, w1) = core_weights(map.order);
                w[n - 1] += eps * w0;
                w[n - 2] += eps * w1;
            }
            w
        }
    }
}

/// Tensor-product quadrature weights of every node of a grid.
pub fn quadrature_weights(domain: &ParamDomain) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = domain.axes().iter().map(axis_weights).collect();
    (0..domain.len())
        .map(|node| {
            (0..domain.dim())
                .map(|a| per_axis[a][domain.coord_index(node, a)])
                .product()
        })
        .collect()
}

/// ∫ f dx over the coordinate box.
pub fn integrate_coordinates(domain: &ParamDomain, f: &[f64]) -> f64 {
    let w = quadrature_weights(domain);
    let terms: Vec<f64> = w.iter().zip(f).map(|(w, f)| w * f).collect();
    pairwise_sum(&terms)
}

/// ∫_M f dμ with dμ = e^{−φ} dv_g.
pub fn integrate_weighted_volume(m: &ChartManifold, f: &[f64]) -> f64 {
    let sg = m.metric().sqrt_det();
    let phi = m.phi().values();
    let density: Vec<f64> = (0..m.len()).map(|k| f[k] * (-phi[k]).exp() * sg[k]).collect();
    integrate_coordinates(m.domain(), &density)
}

/// ∫_M f dv_g.
pub fn integrate_volume(m: &ChartManifold, f: &[f64]) -> f64 {
    let sg = m.metric().sqrt_det();
    let density: Vec<f64> = (0..m.len()).map(|k| f[k] * sg[k]).collect();
    integrate_coordinates(m.domain(), &density)
}

/// ∫_{∂M} f dσ with the weighted boundary measure e^{−φ} √det ḡ dx;
/// `f` holds one array per boundary face.
pub fn integrate_boundary(bg: &BoundaryGeometry, f: &[Vec<f64>]) -> f64 {
    let parts: Vec<f64> = bg
        .faces
        .iter()
        .zip(f)
        .map(|(face, f)| integrate_weighted_volume(&face.chart, f))
        .collect();
    pairwise_sum(&parts)
}

/// ∫_{∂M} f √det ḡ dx, without the density.
pub fn integrate_boundary_unweighted(bg: &BoundaryGeometry, f: &[Vec<f64>]) -> f64 {
    let parts: Vec<f64> = bg
        .faces
        .iter()
        .zip(f)
        .map(|(face, f)| integrate_volume(&face.chart, f))
        .collect();
    pairwise_sum(&parts)
}

/// Both sides of the weighted divergence theorem
/// ∫_M e^φ div(e^{−φ}X) dμ = ∫_{∂M} g(X, ν) dσ for a vector field X^i.
pub fn divergence_identity(m: &ChartManifold, bg: &BoundaryGeometry, x: &[Vec<f64>]) -> Result<(f64, f64)> {
    let div = Differential::new(m)?.weighted_divergence(x)?;
    let lhs = integrate_weighted_volume(m, &div);
    let flux: Vec<Vec<f64>> = bg
        .faces
        .iter()
        .map(|face| {
            face.nodes
                .iter()
                .enumerate()
                .map(|(k, &node)| (0..m.dim()).map(|i| face.nu_lower[i][k] * x[i][node]).sum())
                .collect()
        })
        .collect();
    Ok((lhs, integrate_boundary(bg, &flux)))
}

/// Values computed on a sequence of grids with decreasing spacing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RefinementSeries {
    entries: Vec<(f64, f64)>,
}

impl RefinementSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append `(h, value)`; `h` must be smaller than every previous spacing.
    pub fn push(&mut self, h: f64, value: f64) -> Result<()> {
        if let Some(&(last, _)) = self.entries.last() {
            if h >= last {
                return Err(Error::Input(format!("spacing {h} does not decrease from {last}")));
            }
        }
        self.entries.push((h, value));
        Ok(())
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut s = Self::new();
        for &(h, v) in pairs {
            s.push(h, v)?;
        }
        Ok(s)
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Result of a convergence-order fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceEstimate {
    /// Least-squares slope of log|error| against log h.
    pub order: f64,
    /// Whether trailing entries sat on a round-off floor and were excluded.
    pub plateau: bool,
    /// Number of entries used in the fit.
    pub used: usize,
}

/// Errors at or below this floor are treated as round-off.
const PLATEAU_FLOOR: f64 = 1e-12;

/// Observed order of convergence of a series towards `reference` (zero by default).
pub fn convergence_order(series: &RefinementSeries, reference: Option<f64>) -> Result<ConvergenceEstimate> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientRefinements { needed: 3, got: n });
    }
    let r = reference.unwrap_or(0.0);
    let scale = series
        .entries
        .iter()
        .fold(r.abs(), |a, &(_, v)| a.max(v.abs()))
        .max(1.0);
    let floor = PLATEAU_FLOOR * scale;
    let errors: Vec<(f64, f64)> = series.entries.iter().map(|&(h, v)| (h, (v - r).abs())).collect();
    let mut used = errors.iter().take_while(|(_, e)| *e > floor).count();
    let plateau = used < n;
    if used < 2 {
        used = 2.min(n);
    }
    let pts: Vec<(f64, f64)> = errors[..used]
        .iter()
        .map(|&(h, e)| (h.ln(), e.max(f64::MIN_POSITIVE).ln()))
        .collect();
    Ok(ConvergenceEstimate { order: least_squares_slope(&pts), plateau, used })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Richardson extrapolation of two values on grids with spacing ratio
/// `ratio` for an error expansion of the given order.
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let k = ratio.powf(order);
    (k * fine - coarse) / (k - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary_geometry;
    use crate::chart::catalog::Geometry;
    use crate::chart::scalar_fn;
    use std::f64::consts::PI;

    #[test]
    fn core_weights_match_closed_forms() {
        let (a, b) = core_weights(1);
        assert!((a - 51.0 / 96.0).abs() < 1e-15 && (b + 1.0 / 96.0).abs() < 1e-15);
        let (a, b) = core_weights(2);
        assert!((a - 189.0 / 540.0).abs() < 1e-15 && (b + 1.0 / 540.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let d = ParamDomain::new(vec![Axis::bounded("x", 0.0, 2.0, 9)]).unwrap();
        let f: Vec<f64> = (0..9).map(|j| d.point(j)[0].powi(3)).collect();
        assert!((integrate_coordinates(&d, &f) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn disk_area_and_ball_volume() {
        let m = Geometry::FlatDisk.standard(2).unwrap();
        let one = vec![1.0; m.len()];
        assert!((integrate_weighted_volume(&m, &one) - PI).abs() < 1e-4);
        let m = Geometry::FlatBall3.standard(1).unwrap();
        let one = vec![1.0; m.len()];
        assert!((integrate_weighted_volume(&m, &one) - 4.0 * PI / 3.0).abs() < 1e-3);
        let m = Geometry::FlatDisk
            .standard(1)
            .unwrap()
            .with_weights(scalar_fn(|_| 2f64.ln()), scalar_fn(|_| 1.0))
            .unwrap();
        let one = vec![1.0; m.len()];
        assert!((integrate_weighted_volume(&m, &one) - integrate_volume(&m, &one) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn circle_and_sphere_boundaries() {
        let m = Geometry::FlatDisk.standard(1).unwrap();
        let bg = boundary_geometry(&m).unwrap();
        let ones: Vec<Vec<f64>> = bg.faces.iter().map(|f| vec![1.0; f.nodes.len()]).collect();
        assert!((integrate_boundary(&bg, &ones) - 2.0 * PI).abs() < 1e-8);
        let cos = bg.restrict(&m.sample(scalar_fn(|p| p[1].cos())).unwrap().into_values());
        assert!(integrate_boundary(&bg, &cos).abs() < 1e-10);
        let m = Geometry::FlatBall3.standard(1).unwrap();
        let bg = boundary_geometry(&m).unwrap();
        let ones: Vec<Vec<f64>> = bg.faces.iter().map(|f| vec![1.0; f.nodes.len()]).collect();
        assert!((integrate_boundary(&bg, &ones) - 4.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn synthetic_orders() {
        for p in [2.0, 4.0] {
            let pairs: Vec<(f64, f64)> = (0..5).map(|k| {
                let h = 0.1 / 2f64.powi(k);
                (h, 3.0 * h.powf(p))
            }).collect();
            let est = convergence_order(&RefinementSeries::from_pairs(&pairs).unwrap(), None).unwrap();
            assert!((est.order - p).abs() < 1e-6 && !est.plateau);
        }
        let pairs = [(0.1, 1e-4), (0.05, 2.5e-5), (0.025, 6.25e-6), (0.0125, 1e-14), (0.00625, 2e-14)];
        let est = convergence_order(&RefinementSeries::from_pairs(&pairs).unwrap(), None).unwrap();
        assert!(est.plateau && est.used == 3 && (est.order - 2.0).abs() < 1e-9);
        let short = RefinementSeries::from_pairs(&pairs[..2]).unwrap();
        assert!(matches!(convergence_order(&short, None), Err(Error::InsufficientRefinements { .. })));
    }

    #[test]
    fn richardson_removes_leading_error() {
        let f = |h: f64| 1.0 + 2.0 * h * h;
        assert!((richardson(f(0.1), f(0.05), 2.0, 2.0) - 1.0).abs() < 1e-14);
    }
}
