//! Independent oracles and generators shared by the integration tests and
//! the acceptance suite.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rncplus::automata::Automaton;
use rncplus::dynamics::{CascadeNet, GroundedAlphabet, GroundedNet, InputFunction, NeuronSpec, OutputBand};

/// Solves `x = tanh(wx + v)` and `1 = w·sech²(wx + v)` for `(x, v)` by
/// two-dimensional Newton iteration. The starting point comes from a coarse
/// scan of the fold curve `v(x) = artanh(x) − wx` on the requested side.
pub fn tangency_newton(w: f64, upper: bool) -> (f64, f64) {
    let sign = if upper { 1.0 } else { -1.0 };
    // coarse scan: the fold is where v(x) is extremal
    let mut best = (0.0, f64::INFINITY);
    for k in 1..10_000 {
        let x = sign * k as f64 / 10_000.0;
        let v = x.atanh() - w * x;
        let score = sign * v;
        if score < best.1 {
            best = (x, score);
        }
    }
    let (mut x, mut v) = (best.0, best.0.atanh() - w * best.0);
    for _ in 0..100 {
        let z = w * x + v;
        let t = z.tanh();
        let s = 1.0 - t * t;
        let f1 = x - t;
        let f2 = 1.0 - w * s;
        // Jacobian of (f1, f2) with respect to (x, v)
        let (a, b) = (1.0 - w * s, -s);
        let (c, d) = (2.0 * w * w * s * t, 2.0 * w * s * t);
        let det = a * d - b * c;
        let dx = (f1 * d - b * f2) / det;
        let dv = (a * f2 - c * f1) / det;
        x -= dx;
        v -= dv;
        if dx.abs() < 1e-16 && dv.abs() < 1e-16 {
            break;
        }
    }
    (x, v)
}

/// All roots of `x − tanh(wx + v)` on [−1, 1] located by sign changes on a
/// uniform grid. Tangential roots without a sign change are missed.
pub fn grid_roots(w: f64, v: f64, cells: usize) -> Vec<f64> {
    let g = |x: f64| x - (w * x + v).tanh();
    let mut roots = Vec::new();
    let mut prev = (-1.0f64, g(-1.0));
    for k in 1..=cells {
        let x = -1.0 + 2.0 * k as f64 / cells as f64;
        let gx = g(x);
        if gx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && prev.1.signum() != gx.signum() {
            let (mut lo, mut hi) = (prev.0, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == g(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (x, gx);
    }
    roots
}

/// A random positive-weight cascade with `n` neurons, one identity letter
/// `"e"` and a second letter `"a"`. Offsets are affine with coefficients in
/// [−2, 2]; the output reads the last neuron.
pub fn random_net<R: Rng>(rng: &mut R, n: usize, input_dim: usize) -> GroundedNet {
    let neurons = (0..n)
        .map(|i| NeuronSpec {
            weight: rng.random_range(0.05..6.0),
            beta: InputFunction::affine(
                (0..input_dim + i).map(|_| rng.random_range(-2.0..2.0)).collect(),
                rng.random_range(-1.0..1.0),
            ),
        })
        .collect();
    let mut readout = vec![0.0; n];
    readout[n - 1] = 1.0;
    let net = CascadeNet::new(
        input_dim,
        neurons,
        (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        InputFunction::affine(readout, 0.0),
    )
    .unwrap();
    let mut reps = BTreeMap::new();
    for l in ["e", "a"] {
        reps.insert(l.to_string(), (0..input_dim).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    let alphabet = GroundedAlphabet {
        letters: vec!["e".into(), "a".into()],
        reps,
        identity: Some("e".into()),
        output_bands: vec![OutputBand::new(-2.0, 0.0, "0"), OutputBand::new(0.0, 2.0, "1")],
    };
    GroundedNet::new(net, alphabet).unwrap()
}

/// Iterates the whole network `steps` times under the identity letter.
pub fn joint_iterate(net: &GroundedNet, x: &[f64], steps: usize) -> Vec<f64> {
    let u = net.alphabet.identity_rep().unwrap().to_vec();
    let mut x = x.to_vec();
    for _ in 0..steps {
        x = net.net.step(&x, &u).unwrap();
    }
    x
}

/// Every word over `letters` of length at most `max_len`, shortest first.
pub fn words_up_to(letters: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut all = vec![vec![]];
    let mut frontier: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for w in &frontier {
            for l in letters {
                let mut v = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Aperiodicity by the language definition restricted to short words: some
/// `n ≤ |Q|` makes `x yⁿ z` and `x yⁿ⁺¹ z` produce the same output for all
/// `|x|, |y|, |z| ≤ bound`.
pub fn aperiodic_by_words(a: &Automaton, bound: usize) -> bool {
    let words = words_up_to(a.alphabet(), bound);
    let idx: Vec<Vec<usize>> = words.iter().map(|w| a.semiautomaton().parse_word(w).unwrap()).collect();
    let sa = a.semiautomaton();
    let mut starts: Vec<usize> = idx.iter().map(|x| sa.run_from(a.initial(), x)).collect();
    starts.sort_unstable();
    starts.dedup();
    (1..=a.num_states()).any(|n| {
        idx.iter().all(|y| {
            starts.iter().all(|&q| {
                let mut p = q;
                for _ in 0..n {
                    p = sa.run_from(p, y);
                }
                let p1 = sa.run_from(p, y);
                idx.iter().all(|z| a.output(sa.run_from(p, z)) == a.output(sa.run_from(p1, z)))
            })
        })
    })
}

/// Myhill–Nerode count of a word function: prefixes up to `reach` grouped
/// by their outputs on every suffix up to `suffix`.
pub fn nerode_classes<F>(letters: &[String], f: F, reach: usize, suffix: usize) -> usize
where
    F: Fn(&[String]) -> String,
{
    let prefixes = words_up_to(letters, reach);
    let suffixes = words_up_to(letters, suffix);
    let mut classes = std::collections::BTreeSet::new();
    for x in &prefixes {
        let signature: Vec<String> = suffixes
            .iter()
            .map(|z| {
                let mut w = x.clone();
                w.extend(z.iter().cloned());
                f(&w)
            })
            .collect();
        classes.insert(signature);
    }
    classes.len()
}

/// Depth-first comparison of an automaton with a word function on every word
/// up to `max_len`. Returns the first disagreeing word.
pub fn first_disagreement<F>(a: &Automaton, f: F, max_len: usize) -> Option<Vec<String>>
where
    F: Fn(&[&str]) -> String,
{
    fn go<F: Fn(&[&str]) -> String>(
        a: &Automaton,
        f: &F,
        q: usize,
        word: &mut Vec<usize>,
        max_len: usize,
    ) -> Option<Vec<String>> {
        let letters: Vec<&str> = word.iter().map(|&l| a.alphabet()[l].as_str()).collect();
        if a.output(q) != f(&letters) {
            return Some(letters.iter().map(|s| s.to_string()).collect());
        }
        if word.len() == max_len {
            return None;
        }
        for l in 0..a.alphabet().len() {
            word.push(l);
            let found = go(a, f, a.semiautomaton().next(q, l), word, max_len);
            word.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    go(a, &f, a.initial(), &mut Vec::new(), max_len)
}
