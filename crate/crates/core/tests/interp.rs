mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use cubasquare::interp::*;
use cubasquare::univariate::chebyshev_t;
use proptest::prelude::*;

fn families() -> Vec<InterpFamily> {
    vec![
        InterpFamily::Cheb1,
        InterpFamily::GaussU,
        InterpFamily::Padua,
        InterpFamily::GenCheb { alpha: 0.5, beta: 0.5 },
        InterpFamily::GenCheb { alpha: 0.5, beta: -0.5 },
    ]
}

fn poly4(x: f64, y: f64) -> f64 {
    1.0 - 2.0 * x + 0.5 * x * y - 3.0 * y * y * y + x * x * y * y - 0.25 * y.powi(4)
}

#[test]
fn constants_are_reproduced_everywhere() {
    for fam in families() {
        for n in [2, 5, 8] {
            let i = fam.interpolate(n, |_, _| 1.0).unwrap();
            for p in common::sample_points(20, n as u64) {
                assert_abs_diff_eq!(i.eval(p[0], p[1]), 1.0, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn lower_degree_functions_are_reproduced() {
    let i = InterpFamily::Cheb1.interpolate(8, |x, y| x.powi(3) * y * y).unwrap();
    for p in common::sample_points(30, 2) {
        assert_abs_diff_eq!(i.eval(p[0], p[1]), p[0].powi(3) * p[1] * p[1], epsilon = 1e-11);
    }
    for fam in families() {
        for n in 5..=9 {
            let rows = convergence_report(fam, poly4, &[n], ErrorNorm::Sup).unwrap();
            assert!(rows[0].error <= 1e-9, "{fam:?} n = {n}: {:.2e}", rows[0].error);
        }
    }
}

#[test]
fn cardinal_functions_are_kronecker() {
    for fam in families() {
        for n in [2, 3, 7, 12, 16] {
            let i = fam.interpolate(n, |_, _| 0.0).unwrap();
            for (j, z) in i.nodes.points.iter().enumerate() {
                for k in 0..i.nodes.len() {
                    let want = if j == k { 1.0 } else { 0.0 };
                    let got = i.cardinal(k, z[0], z[1]);
                    assert!((got - want).abs() <= 1e-9, "{fam:?} n = {n} l_{k}(z_{j}) = {got}");
                }
            }
        }
    }
}

#[test]
fn padua_examples() {
    let f = |x: f64, y: f64| chebyshev_t(3, x) * chebyshev_t(2, y);
    for n in 5..=9 {
        let i = InterpFamily::Padua.interpolate(n, f).unwrap();
        for p in common::sample_points(20, 5) {
            assert_abs_diff_eq!(i.eval(p[0], p[1]), f(p[0], p[1]), epsilon = 1e-11);
        }
    }
    let g = |x: f64, y: f64| (x - 0.3 * y).sin() + y * y;
    let i = InterpFamily::Padua.interpolate(11, g).unwrap();
    assert_eq!(i.poly().coeffs.len(), 78);
    for z in &i.nodes.points {
        assert!((i.eval(z[0], z[1]) - g(z[0], z[1])).abs() <= 1e-10);
    }
    let one = InterpFamily::Padua.interpolate(6, |_, _| 1.0).unwrap();
    assert_abs_diff_eq!(one.integral().unwrap(), PI * PI, epsilon = 1e-12);
}

#[test]
fn padua_collocation_is_always_solvable() {
    for n in 1..=20 {
        let i = InterpFamily::Padua.interpolate(n, |x, y| x * y).unwrap();
        let c = i.condition.unwrap();
        assert!(c.is_finite() && c >= 1.0, "n = {n}: {c}");
    }
}

#[test]
fn integrating_the_interpolant_gives_the_rule() {
    let f = |x: f64, y: f64| (1.0 + x * x + 0.5 * y).recip();
    for fam in [InterpFamily::Cheb1, InterpFamily::GaussU, InterpFamily::GenCheb { alpha: 0.5, beta: 0.5 }] {
        for n in [4, 7, 10] {
            let i = fam.interpolate(n, f).unwrap();
            let lambdas = i.lambdas.clone().unwrap();
            let rule: f64 = i.nodes.points.iter().zip(&lambdas).map(|(z, l)| l * f(z[0], z[1])).sum();
            assert!((i.integral().unwrap() - rule).abs() <= 1e-9 * rule.abs().max(1.0), "{fam:?} n = {n}");
        }
    }
}

#[test]
fn lebesgue_small_cases() {
    let l = lebesgue_constant(InterpFamily::Cheb1, 1, 64).unwrap();
    assert_abs_diff_eq!(l, 1.0, epsilon = 1e-12);
    for fam in families() {
        let coarse = lebesgue_constant(fam, 6, 65).unwrap();
        let fine = lebesgue_constant(fam, 6, 129).unwrap();
        assert!(fine >= coarse - 1e-12, "{fam:?}: {fine} < {coarse}");
    }
    assert!(lebesgue_constant(InterpFamily::Cheb1, 4, 16).is_err());
}

#[test]
fn convergence_on_analytic_and_kinked_functions() {
    let rows = convergence_report(InterpFamily::Cheb1, |x, y| (x + y).exp(), &[8, 16], ErrorNorm::Sup).unwrap();
    assert!(rows[1].error < 1e-8 && rows[1].error <= 0.5 * rows[0].error, "{rows:?}");
    let rows = convergence_report(InterpFamily::Cheb1, |x, _| x.abs(), &[8, 16, 32], ErrorNorm::Sup).unwrap();
    for (row, want) in rows.iter().zip([0.083_171_903_450_128_69, 0.039_293_412_580_857_13, 0.018_827_953_245_255_09]) {
        assert!((row.error - want).abs() <= 1e-6 * want, "n = {}: {}", row.n, row.error);
    }
    let l2 = convergence_report(InterpFamily::Padua, |x, y| (x * y).cos(), &[6, 12], ErrorNorm::L2).unwrap();
    assert!(l2[1].error < l2[0].error);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interpolation_is_linear(n in 2usize..10, which in 0usize..5, a in -3.0f64..3.0) {
        let fam = families()[which];
        let f = |x: f64, y: f64| (x - y).sin();
        let g = |x: f64, y: f64| x * x + y;
        let i = fam.interpolate(n, |x, y| f(x, y) + a * g(x, y)).unwrap();
        let fi = fam.interpolate(n, f).unwrap();
        let gi = fam.interpolate(n, g).unwrap();
        for p in common::sample_points(5, n as u64) {
            let lhs = i.eval(p[0], p[1]);
            let rhs = fi.eval(p[0], p[1]) + a * gi.eval(p[0], p[1]);
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }
    }
}
