//! Invariants checked on randomly generated inputs.

use nalgebra::DMatrix;
use proptest::prelude::*;

use reilly::audits::{scaled_margin, Relation};
use reilly::calculus::fornberg_weights;
use reilly::chart::{Axis, ParamDomain};
use reilly::cli::expr::Expr;
use reilly::cli::Scenario;
use reilly::hypersurface::{elementary_symmetric, newton_tensors};
use reilly::integrate::{convergence_order, integrate_coordinates, richardson, RefinementSeries};

fn symmetric(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        (&a + a.transpose()) * 0.5
    })
}

proptest! {
    #[test]
    fn elementary_symmetric_matches_polynomial_coefficients(xs in prop::collection::vec(-2.0f64..2.0, 1..7), t in -1.5f64..1.5) {
        let e = elementary_symmetric(&xs);
        let product: f64 = xs.iter().map(|x| 1.0 + t * x).product();
        let series: f64 = e.iter().enumerate().map(|(r, er)| er * t.powi(r as i32)).sum();
        prop_assert!((product - series).abs() <= 1e-10 * (1.0 + product.abs()));
    }

    #[test]
    fn newton_tensors_satisfy_cayley_hamilton(b in (1usize..6).prop_flat_map(symmetric)) {
        let n = b.nrows();
        let (s, p) = newton_tensors(&b);
        prop_assert!(p[n].abs().max() < 1e-9);
        for r in 0..=n {
            prop_assert!((p[r].trace() - (n - r) as f64 * s[r]).abs() < 1e-9);
            prop_assert!((&p[r] - p[r].transpose()).abs().max() < 1e-9);
        }
        prop_assert!((s[n] - b.determinant()).abs() < 1e-9);
    }

    #[test]
    fn fornberg_weights_are_exact_on_monomials(
        z in -1.0f64..1.0,
        offsets in prop::collection::vec(-3.0f64..3.0, 5..8),
    ) {
        let mut x = offsets.clone();
        x.sort_by(f64::total_cmp);
        prop_assume!(x.windows(2).all(|w| w[1] - w[0] > 0.2));
        let c = fornberg_weights(z, &x, 2);
        for degree in 0..x.len() as i32 {
            let f: Vec<f64> = x.iter().map(|xi| xi.powi(degree)).collect();
            let d1: f64 = c[1].iter().zip(&f).map(|(a, b)| a * b).sum();
            let d2: f64 = c[2].iter().zip(&f).map(|(a, b)| a * b).sum();
            let e1 = if degree >= 1 { degree as f64 * z.powi(degree - 1) } else { 0.0 };
            let e2 = if degree >= 2 { (degree * (degree - 1)) as f64 * z.powi(degree - 2) } else { 0.0 };
            prop_assert!((d1 - e1).abs() < 1e-7 * (1.0 + e1.abs()));
            prop_assert!((d2 - e2).abs() < 1e-6 * (1.0 + e2.abs()));
        }
    }

    #[test]
    fn simpson_grids_integrate_cubics_exactly(
        coeffs in prop::collection::vec(-2.0f64..2.0, 4),
        lower in -2.0f64..0.0,
        width in 0.5f64..3.0,
        half in 4usize..20,
    ) {
        let d = ParamDomain::new(vec![Axis::bounded("x", lower, lower + width, 2 * half + 1)]).unwrap();
        let f: Vec<f64> = (0..d.len()).map(|k| {
            let x = d.point(k)[0];
            coeffs[0] + coeffs[1] * x + coeffs[2] * x * x + coeffs[3] * x * x * x
        }).collect();
        let antiderivative = |x: f64| coeffs[0] * x + coeffs[1] * x * x / 2.0 + coeffs[2] * x.powi(3) / 3.0 + coeffs[3] * x.powi(4) / 4.0;
        let exact = antiderivative(lower + width) - antiderivative(lower);
        prop_assert!((integrate_coordinates(&d, &f) - exact).abs() < 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn richardson_removes_the_leading_error_term(limit in -5.0f64..5.0, c in -3.0f64..3.0, h in 0.01f64..0.5) {
        let at = |h: f64| limit + c * h * h;
        prop_assert!((richardson(at(h), at(h / 2.0), 2.0, 2.0) - limit).abs() < 1e-12);
    }

    #[test]
    fn convergence_order_recovers_power_laws(order in 0.5f64..5.0, c in 0.01f64..10.0) {
        let mut series = RefinementSeries::new();
        for level in 0..4 {
            let h = 0.2 / f64::from(1u32 << level);
            series.push(h, 1.0 + c * h.powf(order)).unwrap();
        }
        let est = convergence_order(&series, Some(1.0)).unwrap();
        prop_assume!(!est.plateau);
        prop_assert!((est.order - order).abs() < 1e-6);
    }

    #[test]
    fn margins_are_oriented(lhs in -10.0f64..10.0, rhs in -10.0f64..10.0) {
        let at_most = scaled_margin(lhs, rhs, Relation::AtMost, 1e-10);
        let at_least = scaled_margin(lhs, rhs, Relation::AtLeast, 1e-10);
        prop_assert_eq!(at_most, -at_least);
        prop_assert_eq!(at_most >= 0.0, lhs <= rhs);
        prop_assert!(at_most.abs() <= 2.0);
    }

    #[test]
    fn expressions_follow_arithmetic(a in -50.0f64..50.0, b in 0.1f64..5.0, x in -3.0f64..3.0) {
        let e = Expr::parse(&format!("{a} + {b} * x^2 - x / {b}"), &["x"]).unwrap();
        let expected = a + b * x * x - x / b;
        prop_assert!((e.eval(&[x]) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        let nested = Expr::parse(&format!("-(x - {a})^2"), &["x"]).unwrap();
        prop_assert!((nested.eval(&[x]) + (x - a).powi(2)).abs() < 1e-12 * (1.0 + (x - a).powi(2)));
    }

    #[test]
    fn scenario_overlay_prefers_the_top_layer(base_level in 0usize..5, top_level in proptest::option::of(0usize..5), beta in 0.0f64..3.0) {
        let base = Scenario { level: Some(base_level), beta: Some(beta), ..Default::default() };
        let top = Scenario { level: top_level, ..Default::default() };
        let merged = base.overlay(&top);
        prop_assert_eq!(merged.level, Some(top_level.unwrap_or(base_level)));
        prop_assert_eq!(merged.beta, Some(beta));
        prop_assert_eq!(merged.overlay(&Scenario::default()), merged.clone());
    }
}
