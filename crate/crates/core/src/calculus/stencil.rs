//! Finite-difference weights and their application along grid axes.

use rayon::prelude::*;

use crate::chart::{AxisKind, Face, ParamDomain, Side};
use crate::error::{Error, Result};

/// Fornberg's algorithm: weights `c[k][j]` such that
/// `f^(k)(z) ≈ Σ_j c[k][j] f(x[j])` for `k = 0..=m`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights of a first or second derivative on a unit-spaced grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeStencil {
    pub derivative: usize,
    pub accuracy: usize,
    /// Central weights at offsets `-half..=half`.
    pub interior: Vec<f64>,
    /// `boundary[k]` gives the weights over nodes `0..width` for the node at
    /// distance `k` from a boundary at the low end.
    pub boundary: Vec<Vec<f64>>,
}

impl DerivativeStencil {
    pub fn new(derivative: usize, accuracy: usize) -> Self {
        assert!(derivative == 1 || derivative == 2, "derivative order must be 1 or 2");
        assert!(accuracy >= 2 && accuracy.is_multiple_of(2), "accuracy must be even");
        let half = Self::half_width_for(derivative, accuracy);
        let offsets: Vec<f64> = (-(half as isize)..=half as isize).map(|k| k as f64).collect();
        let interior = fornberg_weights(0.0, &offsets, derivative)[derivative].clone();
        let width = Self::one_sided_width_for(derivative, accuracy);
        let pts: Vec<f64> = (0..width).map(|k| k as f64).collect();
        let boundary = (0..half)
            .map(|k| fornberg_weights(k as f64, &pts, derivative)[derivative].clone())
            .collect();
        Self { derivative, accuracy, interior, boundary }
    }

    fn half_width_for(derivative: usize, accuracy: usize) -> usize {
        (2 * derivative.div_ceil(2) - 1 + accuracy) / 2
    }

    fn one_sided_width_for(derivative: usize, accuracy: usize) -> usize {
        derivative + accuracy
    }

    pub fn half_width(&self) -> usize {
        self.interior.len() / 2
    }

    /// Number of points of the one-sided stencils.
    pub fn one_sided_width(&self) -> usize {
        Self::one_sided_width_for(self.derivative, self.accuracy)
    }
}

/// Per-node stencil rows for one axis, acting on a line buffer that holds
/// `ghosts_low` ghost values, the line itself and `ghosts_high` ghost values.
struct LinePlan {
    ghosts_low: usize,
    ghosts_high: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

fn line_plan(domain: &ParamDomain, axis: usize, stencil: &DerivativeStencil) -> Result<LinePlan> {
    let ax = domain.axis(axis);
    let n = ax.resolution;
    let half = stencil.half_width();
    let h = ax.spacing();
    let scale = h.powi(stencil.derivative as i32).recip();
    let (gl, gh) = match &ax.kind {
        AxisKind::Periodic => (half, half),
        AxisKind::Interval { low, high } => (
            if low.is_pole() { half } else { 0 },
            if high.is_pole() { half } else { 0 },
        ),
    };
    let needed = if gl > 0 && gh > 0 { half + 1 } else { stencil.one_sided_width() };
    if n < needed.max(half) {
        return Err(Error::ResolutionTooLow { axis, points: n, needed: needed.max(half) });
    }
    let buf_len = gl + n + gh;
    let width = stencil.one_sided_width();
    let rows = (0..n)
        .map(|j| {
            let centre = gl + j;
            if centre >= half && centre + half < buf_len {
                (centre - half, stencil.interior.iter().map(|w| w * scale).collect())
            } else if centre < half {
                let k = centre;
                (0, stencil.boundary[k].iter().map(|w| w * scale).collect())
            } else {
                let k = buf_len - 1 - centre;
                let sign = if stencil.derivative % 2 == 1 { -1.0 } else { 1.0 };
                let w: Vec<f64> = stencil.boundary[k].iter().rev().map(|w| sign * w * scale).collect();
                (buf_len - width, w)
            }
        })
        .collect();
    Ok(LinePlan { ghosts_low: gl, ghosts_high: gh, rows })
}

fn parity_sign(parity: u32, reversed: u32) -> f64 {
    if (parity & reversed).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Fill a line buffer, reading ghost values across periodic seams and poles.
fn fill_line(
    domain: &ParamDomain,
    values: &[f64],
    parity: u32,
    axis: usize,
    base: &[usize],
    plan: &LinePlan,
    buf: &mut [f64],
) {
    let ax = domain.axis(axis);
    let n = ax.resolution;
    let stride = domain.stride(axis);
    let start = domain.index(base);
    let gl = plan.ghosts_low;
    for j in 0..n {
        buf[gl + j] = values[start + j * stride];
    }
    match &ax.kind {
        AxisKind::Periodic => {
            for g in 0..plan.ghosts_low {
                buf[gl - 1 - g] = values[start + (n - 1 - g) * stride];
            }
            for g in 0..plan.ghosts_high {
                buf[gl + n + g] = values[start + g * stride];
            }
        }
        AxisKind::Interval { low, high } => {
            for (side, face) in [(Side::Low, low), (Side::High, high)] {
                let Face::Pole(map) = face else { continue };
                let mut partner = base.to_vec();
                domain.apply_pole_map(map, &mut partner);
                partner[axis] = 0;
                let pstart = domain.index(&partner);
                let sign = parity_sign(parity, ParamDomain::reversed_mask(axis, map));
                match side {
                    Side::Low => {
                        for g in 0..plan.ghosts_low {
                            buf[gl - 1 - g] = sign * values[pstart + g * stride];
                        }
                    }
                    Side::High => {
                        for g in 0..plan.ghosts_high {
                            buf[gl + n + g] = sign * values[pstart + (n - 1 - g) * stride];
                        }
                    }
                }
            }
        }
    }
}

/// Multi-indices of the first node of every grid line along `axis`.
fn line_bases(domain: &ParamDomain, axis: usize) -> Vec<Vec<usize>> {
    (0..domain.len())
        .filter(|&node| domain.coord_index(node, axis) == 0)
        .map(|node| domain.multi_index(node))
        .collect()
}

/// Derivative of order `derivative` along `axis` of grid values with the
/// given parity, using stencils of the given accuracy.
pub fn differentiate(
    domain: &ParamDomain,
    values: &[f64],
    parity: u32,
    axis: usize,
    derivative: usize,
    accuracy: usize,
) -> Result<Vec<f64>> {
    let stencil = DerivativeStencil::new(derivative, accuracy);
    let plan = line_plan(domain, axis, &stencil)?;
    let n = domain.axis(axis).resolution;
    let stride = domain.stride(axis);
    let bases = line_bases(domain, axis);
    let lines: Vec<Vec<f64>> = bases
        .par_iter()
        .map(|base| {
            let mut buf = vec![0.0; plan.ghosts_low + n + plan.ghosts_high];
            fill_line(domain, values, parity, axis, base, &plan, &mut buf);
            plan.rows
                .iter()
                .map(|(s, w)| w.iter().zip(&buf[*s..]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let mut out = vec![0.0; domain.len()];
    for (base, line) in bases.iter().zip(lines) {
        let start = domain.index(base);
        for (j, v) in line.into_iter().enumerate() {
            out[start + j * stride] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_classic_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        let s = DerivativeStencil::new(1, 4);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in s.interior.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn stencils_are_exact_on_polynomials() {
        for (d, p) in [(1, 4), (2, 4), (1, 6), (2, 8)] {
            let s = DerivativeStencil::new(d, p);
            let half = s.half_width() as isize;
            for deg in 0..=p {
                let f = |x: f64| x.powi(deg as i32);
                let exact = |x: f64| match (d, deg) {
                    (_, k) if k < d => 0.0,
                    (1, k) => k as f64 * x.powi(k as i32 - 1),
                    (_, k) => (k * (k - 1)) as f64 * x.powi(k as i32 - 2),
                };
                let x0 = 0.3;
                let c: f64 = (-half..=half).zip(&s.interior).map(|(k, w)| w * f(x0 + k as f64)).sum();
                assert!((c - exact(x0)).abs() < 1e-8 * (1.0 + exact(x0).abs()), "d={d} p={p} deg={deg}");
                for (k, w) in s.boundary.iter().enumerate() {
                    let v: f64 = w.iter().enumerate().map(|(j, w)| w * f(j as f64)).sum();
                    let e = exact(k as f64);
                    assert!((v - e).abs() < 1e-7 * (1.0 + e.abs()), "one-sided d={d} p={p} deg={deg} k={k}");
                }
            }
        }
    }
}
