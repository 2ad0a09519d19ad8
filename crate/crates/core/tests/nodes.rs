mod common;

use std::f64::consts::PI;

use cubasquare::basis2d::gencheb::generalized_basis;
use cubasquare::nodes::*;
use proptest::prelude::*;

const GENCHEB: [(f64, f64); 4] = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (1.5, 0.5)];

fn swap(p: [f64; 2]) -> [f64; 2] {
    [p[1], p[0]]
}

fn negate(p: [f64; 2]) -> [f64; 2] {
    [-p[0], -p[1]]
}

#[test]
fn figure_cardinalities() {
    assert_eq!(min_t_nodes_even(18).unwrap().len(), 180);
    assert_eq!(near_min_t_nodes_odd(17).unwrap().len(), 162);
    assert_eq!(padua_points(11).unwrap().len(), 78);
    assert_eq!(gencheb_nodes(0.5, 0.5, 16).unwrap().len(), 144);
    assert_eq!(gauss_u_nodes(2).unwrap().len(), 3);
    assert_eq!(min_t_nodes_even(2).unwrap().len(), 4);
}

#[test]
fn cardinalities_through_fifty() {
    for n in 1..=50 {
        assert_eq!(gauss_u_nodes(n).unwrap().len(), n * (n + 1) / 2, "gauss_u {n}");
        assert_eq!(padua_points(n).unwrap().len(), (n + 1) * (n + 2) / 2, "padua {n}");
        if n % 2 == 0 {
            assert_eq!(min_t_nodes_even(n).unwrap().len(), n_min(n), "min_t {n}");
        } else {
            assert_eq!(near_min_t_nodes_odd(n).unwrap().len(), n_min(n) + 1, "near_min_t {n}");
        }
        if n >= 2 {
            let want = n_min(n) + n % 2;
            for (a, b) in GENCHEB {
                assert_eq!(gencheb_nodes(a, b, n).unwrap().len(), want, "gencheb ({a}, {b}) {n}");
            }
        }
    }
}

#[test]
fn generators_vanish_through_twenty_one() {
    for n in 1..=21 {
        let mut sets = vec![gauss_u_nodes(n).unwrap(), padua_points(n).unwrap()];
        sets.push(if n % 2 == 0 {
            min_t_nodes_even(n).unwrap()
        } else {
            near_min_t_nodes_odd(n).unwrap()
        });
        for s in sets {
            let polys = s.vanishing_polynomials();
            assert!(!polys.is_empty());
            let r = s.vanishing_residual(&polys);
            assert!(r <= 1e-10, "{} n = {n}: {r:.2e}", s.family);
        }
    }
}

#[test]
fn generalized_nodes_are_zeros_of_one_family() {
    for (a, b) in GENCHEB {
        for n in 2..=12 {
            let s = gencheb_nodes(a, b, n).unwrap();
            let gb = generalized_basis(a, b, -0.5, n).unwrap();
            let polys = if n % 2 == 0 { gb.first } else { gb.second };
            let scale = polys.iter().map(|p| p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))).fold(0.0, f64::max);
            let r = s.vanishing_residual(&polys);
            assert!(r <= 1e-10 * scale.max(1.0), "({a}, {b}) n = {n}: {r:.2e}");
        }
    }
}

#[test]
fn second_kind_nodes_are_interior() {
    for n in 1..=30 {
        let s = gauss_u_nodes(n).unwrap();
        assert!(s.points.iter().all(|p| p[0].abs() < 1.0 && p[1].abs() < 1.0), "n = {n}");
    }
}

#[test]
fn symmetries() {
    for n in 1..=20 {
        let s = if n % 2 == 0 {
            min_t_nodes_even(n).unwrap()
        } else {
            near_min_t_nodes_odd(n).unwrap()
        };
        assert!(s.invariant_under(negate, 1e-12), "first kind n = {n}");
        if n % 2 == 1 {
            assert!(s.invariant_under(swap, 1e-12), "near-minimal n = {n}");
        }
        if n >= 2 {
            for (a, b) in GENCHEB {
                let g = gencheb_nodes(a, b, n).unwrap();
                assert!(g.invariant_under(negate, 1e-12) && g.invariant_under(swap, 1e-12));
            }
        }
    }
}

#[test]
fn chebyshev_specialization_matches_first_kind_minimal() {
    for m in 1..=6 {
        let g = gencheb_nodes(-0.5, -0.5, 2 * m).unwrap();
        let t = min_t_nodes_even(2 * m).unwrap();
        assert!(common::same_set(&g.points, &t.points, 1e-12), "m = {m}");
    }
}

#[test]
fn minimal_generalized_nodes_avoid_diagonals() {
    // odd degrees carry the theta_0 = 0 orbit, which sits on y = x
    for (a, b) in [(0.5, 0.5), (1.5, 0.5), (0.0, 0.25)] {
        for n in (2..=16).step_by(2) {
            let g = gencheb_nodes(a, b, n).unwrap();
            let d = g.points.iter().map(|p| (p[0] - p[1]).abs().min((p[0] + p[1]).abs())).fold(f64::INFINITY, f64::min);
            assert!(d > 1e-8, "({a}, {b}) n = {n}: {d:.2e}");
        }
    }
}

/// Every point is `(-cos((n+1)t), -cos(nt))` for some `t`.
fn on_lissajous(n: usize, p: [f64; 2]) -> bool {
    let base = (-p[0]).clamp(-1.0, 1.0).acos();
    (0..=n + 1).any(|j| {
        [base, -base].iter().any(|b| {
            let t = (b + 2.0 * PI * j as f64) / (n + 1) as f64;
            let q = lissajous_curve_point(n, t);
            (q[0] - p[0]).abs() <= 1e-10 && (q[1] - p[1]).abs() <= 1e-10
        })
    })
}

#[test]
fn padua_points_lie_on_the_curve() {
    for n in 1..=20 {
        let s = padua_points(n).unwrap();
        for p in &s.points {
            assert!(on_lissajous(n, *p), "n = {n}: {p:?}");
        }
    }
}

#[test]
fn curve_examples() {
    assert_eq!(lissajous_curve_point(4, 0.0), [-1.0, -1.0]);
    let p = lissajous_curve_point(11, PI);
    assert!((p[0] + 1.0).abs() < 1e-14 && (p[1] - 1.0).abs() < 1e-14);
}

#[test]
fn parity_errors() {
    assert!(min_t_nodes_even(9).is_err());
    assert!(near_min_t_nodes_odd(10).is_err());
    assert!(gauss_u_nodes(0).is_err());
    assert!(padua_points(0).is_err());
}

proptest! {
    #[test]
    fn curve_is_periodic(n in 1usize..40, t in 0.0f64..6.3) {
        let a = lissajous_curve_point(n, t);
        let b = lissajous_curve_point(n, t + 2.0 * PI);
        prop_assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }

    #[test]
    fn generalized_sets_are_symmetric(a in -0.9f64..2.0, b in -0.9f64..2.0, n in 2usize..14) {
        let g = gencheb_nodes(a, b, n).unwrap();
        prop_assert_eq!(g.len(), n_min(n) + n % 2);
        prop_assert!(g.invariant_under(negate, 1e-11));
        prop_assert!(g.invariant_under(swap, 1e-11));
        prop_assert!(g.inside_square(0.0));
    }
}
