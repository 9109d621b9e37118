mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rncplus::extraction::{eta, ExtractionConfig};
use rncplus::fixtures::{catalog, EMPTY, P};

proptest! {
    #[test]
    fn later_coordinates_never_affect_earlier_ones(seed in any::<u64>(), n in 2usize..5, j in 1usize..4, delta in -0.5f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_net(&mut rng, n, 2);
        let j = j.min(n - 1);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut y = x.clone();
        y[j] = (y[j] + delta).clamp(-1.0, 1.0);
        let u = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let a = net.net.step(&x, &u).unwrap();
        let b = net.net.step(&y, &u).unwrap();
        for i in 0..j {
            prop_assert_eq!(a[i], b[i]);
        }
        prop_assert!(a.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn settling_is_idempotent(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_net(&mut rng, n, 2);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let Ok(once) = net.settle(&x, 1e-12, 1_000_000) else {
            // near-tangent draws exhaust the budget; not what this checks
            return Ok(());
        };
        let twice = net.settle(&once.limit, 1e-12, 1_000_000).unwrap();
        for (a, b) in once.limit.iter().zip(&twice.limit) {
            prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        }
    }
}

#[test]
fn states_stay_open_after_a_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let net = common::random_net(&mut rng, 3, 2);
        let mut x = vec![1.0, -1.0, 1.0];
        for _ in 0..5 {
            x = net.step_letter(&x, if rng.random_bool(0.5) { "e" } else { "a" }).unwrap();
            assert!(x.iter().all(|v| v.abs() <= 1.0));
        }
    }
}

#[test]
fn sequential_settle_matches_joint_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let n = rng.random_range(1..=4);
        let net = common::random_net(&mut rng, n, 2);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let s = net.settle(&x, 1e-12, 100_000).unwrap();
        let joint = common::joint_iterate(&net, &x, 10_000);
        for (a, b) in s.limit.iter().zip(&joint) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn identity_letters_never_change_the_digit_tuple() {
    let cfg = ExtractionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for entry in catalog() {
        let Some(net) = entry.net() else { continue };
        let e = net.alphabet.identity.clone().unwrap();
        let letters = &net.alphabet.letters;
        for _ in 0..30 {
            let len = rng.random_range(0..8);
            let word: Vec<String> = (0..len).map(|_| letters[rng.random_range(0..letters.len())].clone()).collect();
            let mut padded = word.clone();
            for _ in 0..rng.random_range(1..5) {
                let at = rng.random_range(0..=padded.len());
                padded.insert(at, e.clone());
            }
            let end = |w: &[String]| net.run(w).unwrap().trajectory.pop().unwrap();
            let a = eta(net, &end(&word), &cfg).unwrap().tuple;
            let b = eta(net, &end(&padded), &cfg).unwrap().tuple;
            assert_eq!(a, b, "{}: {word:?} vs {padded:?}", entry.name);
        }
    }
}

#[test]
fn latch_hold_keeps_the_tuple() {
    let net = rncplus::fixtures::net_diamond_p();
    let cfg = ExtractionConfig::default();
    let mut x = net.step_letter(net.net.initial_state(), P).unwrap();
    let before = eta(&net, &x, &cfg).unwrap().tuple;
    for _ in 0..100 {
        x = net.step_letter(&x, EMPTY).unwrap();
    }
    assert_eq!(eta(&net, &x, &cfg).unwrap().tuple, before);
}
