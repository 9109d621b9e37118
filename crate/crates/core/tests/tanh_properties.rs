mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rncplus::tanh_analysis::{
    fixpoints, g, g_prime, pivots, settle_scalar, stationary_points, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

const POSITION_TOL: f64 = 1e-7;

#[test]
fn pivots_match_tangency_oracle() {
    for w in [1.01, 1.1, 1.7, 2.0, 4.0, 8.0, 32.0] {
        let p = pivots(w).unwrap();
        let (xp, vp) = common::tangency_newton(w, true);
        let (xm, vm) = common::tangency_newton(w, false);
        assert!((p.p_plus - xp).abs() < 1e-9, "w={w}: {} vs {xp}", p.p_plus);
        assert!((p.v_plus - vp).abs() < 1e-9, "w={w}: {} vs {vp}", p.v_plus);
        assert!((p.p_minus - xm).abs() < 1e-9, "w={w}");
        assert!((p.v_minus - vm).abs() < 1e-9, "w={w}");
    }
}

#[test]
fn fixpoint_positioning_on_random_offsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let w = 1.0 + rng.random_range(f64::EPSILON..9.0);
        let v = rng.random_range(-3.0..=3.0);
        let p = pivots(w).unwrap();
        let fp = fixpoints(w, v, DEFAULT_TOL);
        assert!(fp.points.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert!(fp.points.windows(2).all(|s| s[0] < s[1]));
        let (lo, hi) = (p.p_minus, p.p_plus);
        match fp.points.as_slice() {
            [x] => assert!(*x <= lo + POSITION_TOL || *x >= hi - POSITION_TOL, "w={w} v={v} x={x}"),
            [x1, x2] => assert!(x1 <= &(lo + POSITION_TOL) && x2 >= &(hi - POSITION_TOL), "w={w} v={v}"),
            [x1, x2, x3] => {
                assert!(*x1 <= lo + POSITION_TOL, "w={w} v={v}");
                assert!(lo - POSITION_TOL < *x2 && *x2 < hi + POSITION_TOL, "w={w} v={v}");
                assert!(*x3 >= hi - POSITION_TOL, "w={w} v={v}");
            }
            other => panic!("w={w} v={v}: {} fixpoints", other.len()),
        }
        // Away from tangency the count is decided by the offset window.
        if v > p.v_plus + 1e-6 && v < p.v_minus - 1e-6 {
            assert_eq!(fp.len(), 3, "w={w} v={v}");
        } else if v < p.v_plus - 1e-6 || v > p.v_minus + 1e-6 {
            assert_eq!(fp.len(), 1, "w={w} v={v}");
        }
        // Sign-change roots found independently agree.
        let grid = common::grid_roots(w, v, 4000);
        for r in grid {
            assert!(fp.points.iter().any(|x| (x - r).abs() < 1e-9), "w={w} v={v} root {r}");
        }
    }
}

#[test]
fn contractive_weights_have_one_fixpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let w = rng.random_range(f64::EPSILON..=1.0);
        let v = rng.random_range(-3.0..=3.0);
        let fp = fixpoints(w, v, DEFAULT_TOL);
        assert_eq!(fp.len(), 1, "w={w} v={v}");
        assert!(g(w, v, fp.points[0]).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn translation(w in 1.0001f64..10.0, v in -3.0f64..3.0, d in -1.0f64..1.0) {
        for k in 0..100 {
            let x = -1.0 + 2.0 * k as f64 / 99.0;
            let lhs = g(w, v + w * d, x);
            let rhs = g(w, v, x + d) - d;
            prop_assert!((lhs - rhs).abs() <= 1e-12, "x={} diff={}", x, lhs - rhs);
        }
    }

    #[test]
    fn derivative_bounds(w in 1.0001f64..10.0, v in -3.0f64..3.0) {
        let (s1, s2) = stationary_points(w, v).unwrap();
        for k in 0..201 {
            let x = -1.0 + 2.0 * k as f64 / 200.0;
            let d = g_prime(w, v, x);
            prop_assert!(d >= 1.0 - w - 1e-12 && d <= 1.0 + 1e-12);
            if x <= s1 || x >= s2 {
                prop_assert!(d >= -1e-12, "x={} d={}", x, d);
            }
        }
    }

    #[test]
    fn endpoints_settle_to_extreme_fixpoints(w in 0.05f64..8.0, v in -3.0f64..3.0) {
        let fp = fixpoints(w, v, DEFAULT_TOL);
        // Near-tangent offsets converge too slowly for the budget.
        let p = pivots(w).ok();
        let near_tangent = p.is_some_and(|p| (v - p.v_plus).abs() < 1e-3 || (v - p.v_minus).abs() < 1e-3);
        prop_assume!(!near_tangent);
        let lo = settle_scalar(w, v, -1.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let hi = settle_scalar(w, v, 1.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!((lo - fp.least()).abs() < 1e-9, "{} vs {}", lo, fp.least());
        prop_assert!((hi - fp.greatest()).abs() < 1e-9, "{} vs {}", hi, fp.greatest());
    }
}
