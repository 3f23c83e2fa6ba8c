//! Built-in geometries with closed-form metrics and curvature.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use super::{build_chart_manifold, metric_fn, scalar_fn, Axis, ChartManifold, Face, MetricFn, ParamDomain, PoleMap, ScalarFn};
use crate::error::{Error, Result};

/// Catalog geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Unit disk in polar coordinates (r, theta).
    FlatDisk,
    /// Unit ball in R³ in spherical coordinates (r, theta, psi).
    FlatBall3,
    /// Annulus 1/2 ≤ r ≤ 1 in polar coordinates.
    FlatAnnulus,
    /// Round 2-sphere (theta, psi).
    RoundSphere2,
    /// Round 3-sphere in hyperspherical coordinates (chi, theta, psi).
    RoundSphere3,
    /// Polar cap θ ≤ π/3 of the unit 2-sphere.
    SphericalCap,
    /// Flat torus [0, 2π)².
    FlatTorus2,
}

/// Polar angle of the spherical cap boundary.
pub const CAP_ANGLE: f64 = PI / 3.0;

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

impl Geometry {
    pub const ALL: [Geometry; 7] = [
        Geometry::FlatDisk,
        Geometry::FlatBall3,
        Geometry::FlatAnnulus,
        Geometry::RoundSphere2,
        Geometry::RoundSphere3,
        Geometry::SphericalCap,
        Geometry::FlatTorus2,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Geometry::FlatDisk => "flat-disk",
            Geometry::FlatBall3 => "flat-ball3",
            Geometry::FlatAnnulus => "flat-annulus",
            Geometry::RoundSphere2 => "round-sphere2",
            Geometry::RoundSphere3 => "round-sphere3",
            Geometry::SphericalCap => "spherical-cap",
            Geometry::FlatTorus2 => "flat-torus2",
        }
    }

    pub fn from_id(id: &str) -> Option<Geometry> {
        Self::ALL.into_iter().find(|g| g.id() == id)
    }

    pub fn description(&self) -> &'static str {
        match self {
            Geometry::FlatDisk => "unit disk in R^2, polar chart (r, theta), boundary r = 1",
            Geometry::FlatBall3 => "unit ball in R^3, spherical chart (r, theta, psi), boundary r = 1",
            Geometry::FlatAnnulus => "annulus 1/2 <= r <= 1 in R^2, polar chart, two boundary circles",
            Geometry::RoundSphere2 => "round unit 2-sphere, chart (theta, psi), closed",
            Geometry::RoundSphere3 => "round unit 3-sphere, chart (chi, theta, psi), closed",
            Geometry::SphericalCap => "cap theta <= pi/3 of the unit 2-sphere, boundary theta = pi/3",
            Geometry::FlatTorus2 => "flat torus [0, 2pi)^2, closed",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Geometry::FlatBall3 | Geometry::RoundSphere3 => 3,
            _ => 2,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Geometry::RoundSphere2 | Geometry::RoundSphere3 | Geometry::FlatTorus2)
    }

    /// Chart coordinate names.
    pub fn coordinates(&self) -> &'static [&'static str] {
        match self {
            Geometry::FlatDisk | Geometry::FlatAnnulus => &["r", "theta"],
            Geometry::FlatBall3 => &["r", "theta", "psi"],
            Geometry::RoundSphere2 | Geometry::SphericalCap => &["theta", "psi"],
            Geometry::RoundSphere3 => &["chi", "theta", "psi"],
            Geometry::FlatTorus2 => &["x", "y"],
        }
    }

    /// Names of the Cartesian (embedding) coordinates available to expressions.
    pub fn cartesian(&self) -> &'static [&'static str] {
        match self {
            Geometry::FlatDisk | Geometry::FlatAnnulus => &["x", "y"],
            Geometry::FlatBall3 | Geometry::RoundSphere2 | Geometry::SphericalCap => &["x", "y", "z"],
            Geometry::RoundSphere3 => &["x", "y", "z", "w"],
            Geometry::FlatTorus2 => &[],
        }
    }

    /// Cartesian coordinates of a chart point for a geometry scaled by `radius`.
    pub fn embed(&self, p: &[f64], radius: f64) -> Vec<f64> {
        let v = match self {
            Geometry::FlatDisk | Geometry::FlatAnnulus => vec![p[0] * p[1].cos(), p[0] * p[1].sin()],
            Geometry::FlatBall3 => {
                let (r, t, s) = (p[0], p[1], p[2]);
                vec![r * t.sin() * s.cos(), r * t.sin() * s.sin(), r * t.cos()]
            }
            Geometry::RoundSphere2 | Geometry::SphericalCap => {
                let (t, s) = (p[0], p[1]);
                vec![t.sin() * s.cos(), t.sin() * s.sin(), t.cos()]
            }
            Geometry::RoundSphere3 => {
                let (c, t, s) = (p[0], p[1], p[2]);
                vec![c.sin() * t.sin() * s.cos(), c.sin() * t.sin() * s.sin(), c.sin() * t.cos(), c.cos()]
            }
            Geometry::FlatTorus2 => Vec::new(),
        };
        v.into_iter().map(|x| radius * x).collect()
    }

    /// Chart coordinates followed by Cartesian coordinates.
    pub fn variables(&self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = self.coordinates().to_vec();
        v.extend(self.cartesian());
        v
    }

    /// Values of [`Geometry::variables`] at a chart point.
    pub fn variable_values(&self, p: &[f64], radius: f64) -> Vec<f64> {
        let mut v = p.to_vec();
        v.extend(self.embed(p, radius));
        v
    }

    /// Resolution of refinement level `level` (each level doubles every axis).
    pub fn resolution(&self, level: usize) -> Vec<usize> {
        let k = 1usize << level;
        let odd = 8 * k + 1;
        let periodic = 16 * k;
        match self {
            Geometry::FlatDisk | Geometry::FlatAnnulus | Geometry::RoundSphere2 | Geometry::SphericalCap => {
                vec![odd, periodic]
            }
            Geometry::FlatBall3 | Geometry::RoundSphere3 => vec![odd, odd, periodic],
            Geometry::FlatTorus2 => vec![periodic, periodic],
        }
    }

    /// The grid for the given per-axis resolution.
    pub fn domain(&self, resolution: &[usize]) -> Result<ParamDomain> {
        if resolution.len() != self.dim() {
            return Err(Error::InvalidDomain(format!(
                "{} needs {} resolutions, got {}",
                self.id(),
                self.dim(),
                resolution.len()
            )));
        }
        let n = resolution;
        let pole = |mirrored: Vec<usize>, shifted: Vec<usize>, order: u32| Face::Pole(PoleMap { mirrored, shifted, order });
        let axes = match self {
            Geometry::FlatDisk => vec![
                Axis::interval("r", 0.0, 1.0, n[0], pole(vec![], vec![1], 1), Face::Boundary),
                Axis::periodic("theta", 0.0, TAU, n[1]),
            ],
            Geometry::FlatAnnulus => vec![Axis::bounded("r", 0.5, 1.0, n[0]), Axis::periodic("theta", 0.0, TAU, n[1])],
            Geometry::FlatBall3 => vec![
                Axis::interval("r", 0.0, 1.0, n[0], pole(vec![1], vec![2], 2), Face::Boundary),
                Axis::interval("theta", 0.0, PI, n[1], pole(vec![], vec![2], 1), pole(vec![], vec![2], 1)),
                Axis::periodic("psi", 0.0, TAU, n[2]),
            ],
            Geometry::RoundSphere2 => vec![
                Axis::interval("theta", 0.0, PI, n[0], pole(vec![], vec![1], 1), pole(vec![], vec![1], 1)),
                Axis::periodic("psi", 0.0, TAU, n[1]),
            ],
            Geometry::SphericalCap => vec![
                Axis::interval("theta", 0.0, CAP_ANGLE, n[0], pole(vec![], vec![1], 1), Face::Boundary),
                Axis::periodic("psi", 0.0, TAU, n[1]),
            ],
            Geometry::RoundSphere3 => vec![
                Axis::interval("chi", 0.0, PI, n[0], pole(vec![1], vec![2], 2), pole(vec![1], vec![2], 2)),
                Axis::interval("theta", 0.0, PI, n[1], pole(vec![], vec![2], 1), pole(vec![], vec![2], 1)),
                Axis::periodic("psi", 0.0, TAU, n[2]),
            ],
            Geometry::FlatTorus2 => vec![Axis::periodic("x", 0.0, TAU, n[0]), Axis::periodic("y", 0.0, TAU, n[1])],
        };
        ParamDomain::new(axes)
    }

    /// Metric evaluator for the geometry scaled by `radius`.
    pub fn metric(&self, radius: f64) -> MetricFn {
        let s = radius * radius;
        match self {
            Geometry::FlatDisk | Geometry::FlatAnnulus => metric_fn(move |p| diag(&[s, s * p[0] * p[0]])),
            Geometry::FlatBall3 => metric_fn(move |p| {
                let r2 = p[0] * p[0];
                let st = p[1].sin();
                diag(&[s, s * r2, s * r2 * st * st])
            }),
            Geometry::RoundSphere2 | Geometry::SphericalCap => metric_fn(move |p| {
                let st = p[0].sin();
                diag(&[s, s * st * st])
            }),
            Geometry::RoundSphere3 => metric_fn(move |p| {
                let sc = p[0].sin();
                let st = p[1].sin();
                diag(&[s, s * sc * sc, s * sc * sc * st * st])
            }),
            Geometry::FlatTorus2 => metric_fn(move |_| diag(&[s, s])),
        }
    }

    /// Closed-form Ricci tensor of the geometry scaled by `radius`.
    pub fn ricci(&self, p: &[f64], radius: f64) -> DMatrix<f64> {
        let g = self.metric(radius)(p);
        match self {
            Geometry::RoundSphere2 | Geometry::SphericalCap => g / (radius * radius),
            Geometry::RoundSphere3 => g * (2.0 / (radius * radius)),
            _ => DMatrix::zeros(self.dim(), self.dim()),
        }
    }

    /// Build the chart at a resolution with weight and potential evaluators.
    pub fn chart(&self, resolution: &[usize], radius: f64, phi: ScalarFn, v: ScalarFn) -> Result<ChartManifold> {
        build_chart_manifold(self.domain(resolution)?, self.metric(radius), phi, v)
    }

    /// Build refinement level `level` with φ = 0 and V = 1.
    pub fn standard(&self, level: usize) -> Result<ChartManifold> {
        self.chart(&self.resolution(level), 1.0, scalar_fn(|_| 0.0), scalar_fn(|_| 1.0))
    }

    /// Wrap an evaluator written in Cartesian coordinates as a chart evaluator.
    pub fn cartesian_fn<F>(&self, radius: f64, f: F) -> ScalarFn
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let g = *self;
        scalar_fn(move |p| f(&g.embed(p, radius)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for g in Geometry::ALL {
            assert_eq!(Geometry::from_id(g.id()), Some(g));
        }
        assert_eq!(Geometry::from_id("klein-bottle"), None);
    }

    #[test]
    fn every_catalog_chart_builds() {
        for g in Geometry::ALL {
            let m = g.standard(0).unwrap();
            assert_eq!(m.dim(), g.dim());
            assert_eq!(m.domain().is_closed(), g.is_closed());
            assert!(!m.domain().has_corners());
            assert!(m.metric().identity_defect() < 1e-12);
        }
    }

    #[test]
    fn sphere_volume_element_at_equator() {
        let g = Geometry::RoundSphere2;
        let metric = g.metric(1.0);
        let m = metric(&[PI / 2.0, 0.3]);
        assert!((m.determinant().sqrt() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn embedding_lies_on_the_sphere() {
        let p = Geometry::RoundSphere3.embed(&[0.4, 1.1, 2.3], 2.0);
        let r: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - 2.0).abs() < 1e-14);
    }
}
