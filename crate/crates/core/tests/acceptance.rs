//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rncplus::automata::{net_equivalent, Automaton, Equivalence, SweepConfig, DEFAULT_MONOID_CAP};
use rncplus::extraction::{extract, ExtractionConfig};
use rncplus::fixtures::{brute_membership, catalog, fixture, Oracle, EMPTY, P};
use rncplus::io::to_stable_json;
use rncplus::tanh_analysis::{fixpoints, pivots, DEFAULT_TOL};

struct Outcome {
    passed: bool,
    summary: String,
    report: Value,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>, report: Value) -> Self {
        Self {
            passed,
            summary: summary.into(),
            report,
        }
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn pivot_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for w in [1.01, 1.1, 1.7, 2.0, 4.0, 8.0, 32.0] {
        let p = pivots(w).unwrap();
        let (xp, vp) = common::tangency_newton(w, true);
        let (xm, vm) = common::tangency_newton(w, false);
        let err = [p.p_plus - xp, p.v_plus - vp, p.p_minus - xm, p.v_minus - vm]
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        worst = worst.max(err);
        rows.push(json!({"w": w, "p_plus": p.p_plus, "v_plus": p.v_plus, "oracle_error": err}));
    }
    let p = pivots(1.7).unwrap();
    let figure = (p.p_plus - 0.64).abs() <= 0.005
        && (p.p_minus + 0.64).abs() <= 0.005
        && (p.v_plus + 0.33).abs() <= 0.005
        && (p.v_minus - 0.33).abs() <= 0.005;
    Outcome::new(
        worst < 1e-9 && figure,
        format!(
            "max oracle error {worst:.1e}; w=1.7: p± = ±{:.4}, v± = ∓{:.4}",
            p.p_plus, p.v_minus
        ),
        json!({"rows": rows, "max_error": worst, "figure_markers": figure}),
    )
}

fn fixpoint_positioning() -> Outcome {
    const TOL: f64 = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut violations = Vec::new();
    let mut counts = [0usize; 4];
    for _ in 0..1000 {
        let w = 1.0 + rng.random_range(f64::EPSILON..9.0);
        let v = rng.random_range(-3.0..=3.0);
        let p = pivots(w).unwrap();
        let fp = fixpoints(w, v, DEFAULT_TOL);
        let (lo, hi) = (p.p_minus, p.p_plus);
        let in_range = fp.points.iter().all(|x| (-1.0..=1.0).contains(x));
        let positioned = match fp.points.as_slice() {
            [x] => *x <= lo + TOL || *x >= hi - TOL,
            [x1, x2] => *x1 <= lo + TOL && *x2 >= hi - TOL,
            [x1, x2, x3] => *x1 <= lo + TOL && lo - TOL < *x2 && *x2 < hi + TOL && *x3 >= hi - TOL,
            _ => false,
        };
        counts[fp.len().min(3)] += 1;
        if !(in_range && positioned) {
            violations.push(json!({"w": w, "v": v, "fixpoints": fp.points}));
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "{} violations; one/two/three fixpoints: {}/{}/{}",
            violations.len(),
            counts[1],
            counts[2],
            counts[3]
        ),
        json!({"violations": violations, "counts": counts}),
    )
}

fn contractive_uniqueness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let w = rng.random_range(f64::EPSILON..=1.0);
        let v = rng.random_range(-3.0..=3.0);
        let fp = fixpoints(w, v, DEFAULT_TOL);
        if fp.len() != 1 {
            bad.push(json!({"w": w, "v": v, "fixpoints": fp.points}));
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{} of 1000 draws without exactly one fixpoint", bad.len()),
        json!({"bad": bad}),
    )
}

fn convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut most_steps = 0;
    for trial in 0..200 {
        let n = rng.random_range(1..=4);
        let net = common::random_net(&mut rng, n, 2);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        match net.settle(&x, 1e-12, 100_000) {
            Err(e) => failures.push(json!({"trial": trial, "error": e.to_string()})),
            Ok(s) => {
                most_steps = most_steps.max(s.steps);
                let joint = common::joint_iterate(&net, &x, 10_000);
                let gap = s.limit.iter().zip(&joint).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst_gap = worst_gap.max(gap);
                if gap > 1e-9 {
                    failures.push(json!({"trial": trial, "gap": gap}));
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{} failures; max sequential/joint gap {worst_gap:.1e}; most settle steps {most_steps}",
            failures.len()
        ),
        json!({"failures": failures, "max_gap": worst_gap, "max_steps": most_steps}),
    )
}

/// Extraction of every net fixture, checked against its net.
fn extraction_runs() -> Vec<(String, Value, bool)> {
    let cfg = ExtractionConfig::default();
    let mut out = Vec::new();
    for entry in catalog() {
        let Some(net) = entry.net() else { continue };
        let report = extract(net, &cfg).unwrap();
        let one_neuron = net.net.len() == 1;
        let sweep = SweepConfig {
            max_len: if one_neuron { 12 } else { 10 },
            random_trials: 10_000,
            seed: 2024,
            jobs: 4,
        };
        // random words of length up to 8 · max_len, which covers length 80
        let eq = net_equivalent(net, &report.flat, &sweep).unwrap();
        let bound_ok = report.state_count <= report.state_bound();
        let ok = bound_ok && report.representative_mismatches() == 0 && eq == Equivalence::Equal;
        out.push((
            entry.name.to_string(),
            json!({
                "name": entry.name,
                "neurons": report.neurons,
                "state_count": report.state_count,
                "bound": report.state_bound(),
                "mismatches": report.representative_mismatches(),
                "max_len": sweep.max_len,
                "equivalence": eq,
            }),
            ok,
        ));
    }
    out
}

fn extraction_soundness() -> Outcome {
    let runs = extraction_runs();
    let passed = runs.iter().all(|r| r.2);
    let summary = runs
        .iter()
        .map(|(n, v, ok)| format!("{n}: {} tuples{}", v["state_count"], if *ok { "" } else { " FAILED" }))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(passed, summary, Value::Array(runs.into_iter().map(|r| r.1).collect()))
}

/// Letters whose transition maps every reachable state to an equivalent
/// state, decided by searching pairs of states for a distinguishing word.
fn identity_letters_by_search(a: &Automaton) -> Vec<String> {
    let sa = a.semiautomaton();
    let n = a.num_states();
    let distinguishable = |p: usize, q: usize| -> bool {
        let mut seen = BTreeSet::from([(p, q)]);
        let mut queue = VecDeque::from([(p, q)]);
        while let Some((p, q)) = queue.pop_front() {
            if a.output(p) != a.output(q) {
                return true;
            }
            for l in 0..a.alphabet().len() {
                let next = (sa.next(p, l), sa.next(q, l));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        false
    };
    let mut reachable = vec![false; n];
    let mut queue = VecDeque::from([a.initial()]);
    reachable[a.initial()] = true;
    while let Some(q) = queue.pop_front() {
        for l in 0..a.alphabet().len() {
            let t = sa.next(q, l);
            if !reachable[t] {
                reachable[t] = true;
                queue.push_back(t);
            }
        }
    }
    a.alphabet()
        .iter()
        .enumerate()
        .filter(|&(l, _)| (0..n).filter(|&q| reachable[q]).all(|q| !distinguishable(q, sa.next(q, l))))
        .map(|(_, name)| name.clone())
        .collect()
}

fn identity_detection() -> Outcome {
    let expected: [(&str, &str); 5] = [
        ("diamond_p", EMPTY),
        ("p_since_q", P),
        ("grid_3x3", "stayed"),
        ("sum_mod_7", "0"),
        ("sum_bits_eq_16", "0"),
    ];
    let mut fixtures_ok = true;
    let mut found = Vec::new();
    for (name, id) in expected {
        let ids = fixture(name).unwrap().automaton().identity_letters();
        fixtures_ok &= ids == [id.to_string()];
        found.push(json!({"name": name, "identity_letters": ids}));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut spurious = Vec::new();
    for trial in 0..100 {
        let (name, id) = expected[rng.random_range(0..expected.len())];
        let a = fixture(name).unwrap().automaton().clone();
        let mut delta = a.semiautomaton().delta().to_vec();
        let letters = a.alphabet().to_vec();
        let movers: Vec<usize> = (0..letters.len()).filter(|&l| letters[l] != id).collect();
        let l = movers[rng.random_range(0..movers.len())];
        let q = rng.random_range(0..delta.len());
        let old = delta[q][l];
        let choices: Vec<usize> = (0..delta.len()).filter(|&t| t != old).collect();
        delta[q][l] = choices[rng.random_range(0..choices.len())];
        let m = Automaton::from_table(letters, delta, a.initial(), a.outputs().to_vec()).unwrap();
        let reported = m.identity_letters();
        let truth = identity_letters_by_search(&m);
        if reported != truth {
            spurious.push(json!({"trial": trial, "fixture": name, "reported": reported, "truth": truth}));
        }
    }
    Outcome::new(
        fixtures_ok && spurious.is_empty(),
        format!(
            "fixtures {}; {} of 100 mutations disagree with the search oracle",
            if fixtures_ok { "as expected" } else { "WRONG" },
            spurious.len()
        ),
        json!({"fixtures": found, "mutation_disagreements": spurious}),
    )
}

fn aperiodicity_frontier() -> Outcome {
    let cases = [
        ("diamond_p", true),
        ("p_since_q", true),
        ("grid_3x3", true),
        ("sum_bits_eq_16", true),
        ("sum_mod_2", false),
        ("sum_mod_3", false),
        ("sum_mod_7", false),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, expected) in cases {
        let r = fixture(name).unwrap().automaton().aperiodicity(DEFAULT_MONOID_CAP).unwrap();
        ok &= r.aperiodic == expected;
        rows.push(json!({"name": name, "aperiodic": r.aperiodic, "monoid_size": r.monoid_size}));
    }
    let summary = rows
        .iter()
        .map(|r| format!("{}={}", r["name"].as_str().unwrap(), r["aperiodic"]))
        .collect::<Vec<_>>()
        .join(" ");
    Outcome::new(ok, summary, Value::Array(rows))
}

fn succinctness() -> Outcome {
    let cfg = ExtractionConfig::default();
    let counts: Vec<Value> = catalog()
        .iter()
        .filter_map(|e| e.net())
        .map(|net| {
            let r = extract(net, &cfg).unwrap();
            json!({"state_count": r.state_count, "bound": r.state_bound()})
        })
        .collect();
    let bounds_ok = counts.iter().all(|v| v["state_count"].as_u64() <= v["bound"].as_u64());
    let latch = catalog().into_iter().find(|e| e.name == "latch_diamond_p").unwrap();
    let report = extract(latch.net().unwrap(), &ExtractionConfig::default()).unwrap();
    let minimal = report.flat.minimize().num_states();
    let letters = vec![EMPTY.to_string(), P.to_string()];
    let nerode = common::nerode_classes(&letters, |w| brute_membership("diamond_p", w).unwrap(), 4, 4);
    Outcome::new(
        bounds_ok && minimal == 2 && nerode == 2,
        format!("all extractions within 3^n; minimal latch automaton {minimal} states, Nerode oracle {nerode}"),
        json!({"extractions": counts, "bounds_ok": bounds_ok, "minimal_latch_states": minimal, "nerode_classes": nerode}),
    )
}

fn oracle_agreement() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for entry in catalog() {
        let FixtureKindName::Dfa = kind(&entry) else { continue };
        let oracle = Oracle::from_name(entry.oracle).unwrap();
        let bad = common::first_disagreement(entry.automaton(), |w| oracle.output(w).unwrap(), 8);
        ok &= bad.is_none();
        rows.push(json!({"name": entry.name, "first_disagreement": bad}));
    }
    Outcome::new(
        ok,
        format!("{} DFA fixtures checked on every word up to length 8", rows.len()),
        Value::Array(rows),
    )
}

enum FixtureKindName {
    Dfa,
    Net,
}

fn kind(entry: &rncplus::fixtures::FixtureEntry) -> FixtureKindName {
    if entry.net().is_some() {
        FixtureKindName::Net
    } else {
        FixtureKindName::Dfa
    }
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "pivot closed forms",
        budget: Duration::from_secs(1),
        run: pivot_closed_forms,
    },
    Criterion {
        id: 2,
        title: "fixpoint positioning",
        budget: Duration::from_secs(5),
        run: fixpoint_positioning,
    },
    Criterion {
        id: 3,
        title: "contractive uniqueness",
        budget: Duration::from_secs(5),
        run: contractive_uniqueness,
    },
    Criterion {
        id: 4,
        title: "settling convergence",
        budget: Duration::from_secs(30),
        run: convergence,
    },
    Criterion {
        id: 5,
        title: "extraction soundness",
        budget: Duration::from_secs(120),
        run: extraction_soundness,
    },
    Criterion {
        id: 6,
        title: "identity detection",
        budget: Duration::from_secs(5),
        run: identity_detection,
    },
    Criterion {
        id: 7,
        title: "aperiodicity frontier",
        budget: Duration::from_secs(10),
        run: aperiodicity_frontier,
    },
    Criterion {
        id: 8,
        title: "succinctness bound",
        budget: Duration::from_secs(10),
        run: succinctness,
    },
    Criterion {
        id: 9,
        title: "oracle agreement",
        budget: Duration::from_secs(30),
        run: oracle_agreement,
    },
];

fn line(passed: bool, id: u32, title: &str, elapsed: Duration, budget: Duration, summary: &str) {
    let budget = if budget.is_zero() {
        "   -".to_string()
    } else {
        format!("{:>3}s", budget.as_secs())
    };
    println!(
        "{} {id:>2} {title:<24} {:>7.2}s / {budget}  {summary}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
    );
}

fn main() {
    let mut all_passed = true;
    let mut first = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let within = elapsed <= c.budget;
        let passed = outcome.passed && within;
        let summary = if within {
            outcome.summary.clone()
        } else {
            format!("{} (over time budget)", outcome.summary)
        };
        line(passed, c.id, c.title, elapsed, c.budget, &summary);
        all_passed &= passed;
        first.push(to_stable_json(&outcome.report).unwrap());
    }

    let start = Instant::now();
    let differing: Vec<u32> = CRITERIA
        .iter()
        .zip(&first)
        .filter(|(c, json)| to_stable_json(&(c.run)().report).unwrap() != **json)
        .map(|(c, _)| c.id)
        .collect();
    let passed = differing.is_empty();
    line(
        passed,
        10,
        "determinism",
        start.elapsed(),
        Duration::from_secs(0),
        &if passed {
            "criteria 1-9 reproduce byte-identical JSON reports".to_string()
        } else {
            format!("reports differ for criteria {differing:?}")
        },
    );
    all_passed &= passed;

    if !all_passed {
        std::process::exit(1);
    }
}
