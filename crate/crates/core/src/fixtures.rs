//! Reference automata, hand-built positive-weight networks, and brute-force
//! oracles that compute the same functions without any automaton.
//!
//! Acceptors output `"1"` (accept) or `"0"` (reject). Letters of the
//! temporal fixtures are proposition sets written `∅`, `{p}`, `{q}`, `{p,q}`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automata::Automaton;
use crate::dynamics::{CascadeNet, GroundedAlphabet, GroundedNet, InputFunction, NeuronSpec, OutputBand};
use crate::tanh_analysis::pivots;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("cell ({x},{y}) lies outside the {n}x{m} grid")]
    OutOfBounds { x: usize, y: usize, n: usize, m: usize },
    #[error("drive {drive} too weak for weight {weight}: need weight > 1 and drive > {needed}")]
    WeakDrive { weight: f64, drive: f64, needed: f64 },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("no letter holds every level")]
    NoIdentityLetter,
    #[error("invalid fixture parameter: {0}")]
    InvalidParameter(String),
    #[error("token {token:?} is not a letter of {fixture}")]
    InvalidWord { fixture: String, token: String },
}

pub const EMPTY: &str = "∅";
pub const P: &str = "{p}";
pub const Q: &str = "{q}";
pub const PQ: &str = "{p,q}";

pub const GRID_LETTERS: [&str; 5] = ["stayed", "left", "right", "up", "down"];

fn acceptor(accepting: bool) -> String {
    if accepting { "1" } else { "0" }.to_string()
}

/// Two states over `∅`, `{p}`: accepts once `p` has occurred.
pub fn dfa_diamond_p() -> Automaton {
    Automaton::from_table([EMPTY, P], vec![vec![0, 1], vec![1, 1]], 0, ["0", "1"])
        .expect("static table is valid")
}

/// `p S q` over the four proposition sets. States: no `q` yet, holding,
/// broken. The first and last are equivalent; the minimal automaton has two
/// states.
pub fn dfa_p_since_q() -> Automaton {
    // letters: ∅, {p}, {q}, {p,q}
    Automaton::from_table(
        [EMPTY, P, Q, PQ],
        vec![vec![0, 0, 1, 1], vec![2, 1, 1, 1], vec![2, 2, 1, 1]],
        0,
        ["0", "1", "0"],
    )
    .expect("static table is valid")
}

/// `p` occurred, and `q` occurred at some strictly later step.
pub fn dfa_p_then_q() -> Automaton {
    Automaton::from_table(
        [EMPTY, P, Q, PQ],
        vec![vec![0, 1, 0, 1], vec![1, 1, 2, 2], vec![2, 2, 2, 2]],
        0,
        ["0", "0", "1"],
    )
    .expect("static table is valid")
}

/// A cell of a finite grid, columns `1..=n` and rows `1..=m`.
pub type Cell = (usize, usize);

/// Walks on an `n × m` grid with clamped moves; accepts while on `goal`.
/// Cell `(x, y)` is state `(y − 1)·n + (x − 1)`.
pub fn dfa_grid(n: usize, m: usize, start: Cell, goal: Cell) -> Result<Automaton, FixtureError> {
    for (x, y) in [start, goal] {
        if x < 1 || x > n || y < 1 || y > m {
            return Err(FixtureError::OutOfBounds { x, y, n, m });
        }
    }
    let index = |x: usize, y: usize| (y - 1) * n + (x - 1);
    let mut delta = Vec::with_capacity(n * m);
    let mut outputs = Vec::with_capacity(n * m);
    for y in 1..=m {
        for x in 1..=n {
            delta.push(vec![
                index(x, y),
                index(x.saturating_sub(1).max(1), y),
                index((x + 1).min(n), y),
                index(x, (y + 1).min(m)),
                index(x, y.saturating_sub(1).max(1)),
            ]);
            outputs.push(acceptor((x, y) == goal));
        }
    }
    Ok(Automaton::from_table(GRID_LETTERS.map(String::from), delta, index(start.0, start.1), outputs)?)
}

impl From<crate::automata::AutomatonError> for FixtureError {
    fn from(e: crate::automata::AutomatonError) -> Self {
        FixtureError::InvalidParameter(e.to_string())
    }
}

/// Running sum modulo `k` over letters `"0"…"k−1"`, output the residue.
pub fn dfa_sum_mod_k(k: usize) -> Result<Automaton, FixtureError> {
    if k < 2 {
        return Err(FixtureError::InvalidParameter(format!("modulus {k} below 2")));
    }
    let letters: Vec<String> = (0..k).map(|a| a.to_string()).collect();
    let delta = (0..k).map(|q| (0..k).map(|a| (q + a) % k).collect()).collect();
    Ok(Automaton::from_table(letters.clone(), delta, 0, letters)?)
}

/// Bits summing to exactly `target`. States `0..=target` count ones, state
/// `target + 1` is the overflow sink.
pub fn dfa_sum_bits_eq(target: usize) -> Automaton {
    let sink = target + 1;
    let delta = (0..=sink).map(|q| vec![q, (q + 1).min(sink)]).collect();
    let outputs: Vec<String> = (0..=sink).map(|q| acceptor(q == target)).collect();
    Automaton::from_table(["0", "1"].map(String::from), delta, 0, outputs).expect("counter table is valid")
}

/// Label of products above the cap.
pub const OVER_CAP: &str = "over";

/// Product of letters `"0"…"3"`, reported exactly up to `cap` and as
/// [`OVER_CAP`] beyond. Only reachable values become states.
pub fn dfa_product_capped(cap: u64) -> Result<Automaton, FixtureError> {
    if cap < 1 {
        return Err(FixtureError::InvalidParameter("cap must be at least 1".into()));
    }
    let letters = ["0", "1", "2", "3"];
    // None stands for the overflow value.
    let mul = |v: Option<u64>, a: u64| -> Option<u64> {
        match v {
            _ if a == 0 => Some(0),
            Some(0) => Some(0),
            None => None,
            Some(v) => Some(v * a).filter(|&p| p <= cap),
        }
    };
    let mut index: HashMap<Option<u64>, usize> = HashMap::from([(Some(1), 0)]);
    let mut values = vec![Some(1)];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(letters.len());
        for a in 0..letters.len() as u64 {
            let t = mul(values[i], a);
            let j = *index.entry(t).or_insert_with(|| {
                values.push(t);
                queue.push_back(values.len() - 1);
                values.len() - 1
            });
            row.push(j);
        }
        delta.push(row);
    }
    let outputs: Vec<String> = values
        .iter()
        .map(|v| v.map_or(OVER_CAP.to_string(), |v| v.to_string()))
        .collect();
    Ok(Automaton::from_table(letters.map(String::from), delta, 0, outputs)?)
}

/// What a letter does to one latch level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Hold,
    SetHigh,
    SetLow,
}

/// One latch neuron: a command per letter, optionally gated by an earlier
/// level so that the latch is pushed low while that level is low.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpec {
    pub commands: Vec<(String, Command)>,
    pub guard: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    pub weight: f64,
    pub drive: f64,
    pub levels: Vec<LevelSpec>,
}

pub const DEFAULT_LATCH_WEIGHT: f64 = 4.0;
pub const DEFAULT_LATCH_DRIVE: f64 = 8.0;

/// Smallest admissible drive for a latch of weight `w`: from any state in
/// `[−1, 1]` one set letter lands beyond the pivot on the commanded side.
pub fn minimum_drive(w: f64) -> Option<f64> {
    pivots(w).ok().map(|p| p.p_plus.atanh() + w)
}

/// Builds a cascade of latch neurons with one-hot letter inputs.
///
/// Level `i` has offset `Σ_σ c_σ u_σ` with `c_σ ∈ {+b, −b, 0}`; a guard on
/// level `j` adds `2b·x_j − 2b`. All neurons start at −1. The output reads
/// the last level: negative values map to `"0"`, the rest to `"1"`. The
/// identity letter is the first letter (in the first level's order) that
/// holds on every level.
pub fn build_cascade_net(spec: &CascadeSpec) -> Result<GroundedNet, FixtureError> {
    let (w, b) = (spec.weight, spec.drive);
    let needed = minimum_drive(w).unwrap_or(f64::INFINITY);
    if b.is_nan() || b <= needed {
        return Err(FixtureError::WeakDrive {
            weight: w,
            drive: b,
            needed,
        });
    }
    let first = spec
        .levels
        .first()
        .ok_or_else(|| FixtureError::InvalidParameter("no levels".into()))?;
    let letters: Vec<String> = first.commands.iter().map(|(l, _)| l.clone()).collect();
    let k = letters.len();

    let mut tables: Vec<BTreeMap<&str, Command>> = Vec::new();
    for (i, level) in spec.levels.iter().enumerate() {
        let table: BTreeMap<&str, Command> = level.commands.iter().map(|(l, c)| (l.as_str(), *c)).collect();
        if table.len() != k || letters.iter().any(|l| !table.contains_key(l.as_str())) {
            return Err(FixtureError::InvalidParameter(format!(
                "level {} does not command exactly the letters {letters:?}",
                i + 1
            )));
        }
        if level.guard.is_some_and(|g| g >= i) {
            return Err(FixtureError::InvalidParameter(format!(
                "level {} is guarded by a level that is not earlier",
                i + 1
            )));
        }
        tables.push(table);
    }

    let identity = letters
        .iter()
        .find(|l| tables.iter().all(|t| t[l.as_str()] == Command::Hold))
        .cloned()
        .ok_or(FixtureError::NoIdentityLetter)?;

    let n = spec.levels.len();
    let neurons = spec
        .levels
        .iter()
        .zip(&tables)
        .enumerate()
        .map(|(i, (level, table))| {
            let mut weights: Vec<f64> = letters
                .iter()
                .map(|l| match table[l.as_str()] {
                    Command::Hold => 0.0,
                    Command::SetHigh => b,
                    Command::SetLow => -b,
                })
                .collect();
            weights.extend(std::iter::repeat_n(0.0, i));
            let mut bias = 0.0;
            if let Some(g) = level.guard {
                weights[k + g] = 2.0 * b;
                bias = -2.0 * b;
            }
            NeuronSpec {
                weight: w,
                beta: InputFunction::affine(weights, bias),
            }
        })
        .collect();
    let mut readout = vec![0.0; n];
    readout[n - 1] = 1.0;
    let net = CascadeNet::new(
        k,
        neurons,
        vec![-1.0; n],
        InputFunction::affine(readout, 0.0),
    )
    .map_err(|e| FixtureError::InvalidParameter(e.to_string()))?;

    let reps = letters
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut u = vec![0.0; k];
            u[i] = 1.0;
            (l.clone(), u)
        })
        .collect();
    let alphabet = GroundedAlphabet {
        letters,
        reps,
        identity: Some(identity),
        output_bands: vec![OutputBand::new(-2.0, 0.0, "0"), OutputBand::new(0.0, 2.0, "1")],
    };
    GroundedNet::new(net, alphabet).map_err(|e| FixtureError::InvalidParameter(e.to_string()))
}

/// Letters of a single latch. Hold letters come first in the alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatchLetters {
    pub set_high: Vec<String>,
    pub set_low: Vec<String>,
    pub hold: Vec<String>,
}

pub fn build_latch_net(w: f64, b: f64, letters: &LatchLetters) -> Result<GroundedNet, FixtureError> {
    let commands = letters
        .hold
        .iter()
        .map(|l| (l.clone(), Command::Hold))
        .chain(letters.set_high.iter().map(|l| (l.clone(), Command::SetHigh)))
        .chain(letters.set_low.iter().map(|l| (l.clone(), Command::SetLow)))
        .collect();
    build_cascade_net(&CascadeSpec {
        weight: w,
        drive: b,
        levels: vec![LevelSpec { commands, guard: None }],
    })
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// The latch for `◊p` over `∅`, `{p}`.
pub fn net_diamond_p() -> GroundedNet {
    build_latch_net(
        DEFAULT_LATCH_WEIGHT,
        DEFAULT_LATCH_DRIVE,
        &LatchLetters {
            set_high: strings(&[P]),
            set_low: vec![],
            hold: strings(&[EMPTY]),
        },
    )
    .expect("default latch is valid")
}

/// One latch for `p S q`: any set with `q` sets it, `∅` clears it, `{p}`
/// holds it.
pub fn net_p_since_q() -> GroundedNet {
    build_cascade_net(&CascadeSpec {
        weight: DEFAULT_LATCH_WEIGHT,
        drive: DEFAULT_LATCH_DRIVE,
        levels: vec![LevelSpec {
            commands: vec![
                (EMPTY.into(), Command::SetLow),
                (P.into(), Command::Hold),
                (Q.into(), Command::SetHigh),
                (PQ.into(), Command::SetHigh),
            ],
            guard: None,
        }],
    })
    .expect("default latch is valid")
}

/// Two latches for "p, and later q": the second is guarded by the first.
pub fn net_p_then_q() -> GroundedNet {
    let level = |on: [&str; 2], guard| LevelSpec {
        commands: [EMPTY, P, Q, PQ]
            .iter()
            .map(|l| {
                let c = if on.contains(l) { Command::SetHigh } else { Command::Hold };
                (l.to_string(), c)
            })
            .collect(),
        guard,
    };
    build_cascade_net(&CascadeSpec {
        weight: DEFAULT_LATCH_WEIGHT,
        drive: DEFAULT_LATCH_DRIVE,
        levels: vec![level([P, PQ], None), level([Q, PQ], Some(0))],
    })
    .expect("default cascade is valid")
}

/// A weight-2 neuron whose identity offset sits exactly at tangency: the
/// upper stable and middle fixpoints coincide at the pivot, so settling
/// converges sublinearly and representatives of the same tuple stop at
/// slightly different points. Not part of the catalog; it exists to exercise
/// the consistency diagnostics.
pub fn net_tangent_latch() -> GroundedNet {
    let w = 2.0;
    let v = pivots(w).expect("bistable weight").v_plus;
    let letters = strings(&["e", "a", "b", "c", "d"]);
    let offsets = [v, v + 5.0, v + 6.0, v + 7.0, v - 6.0];
    let net = CascadeNet::new(
        letters.len(),
        vec![NeuronSpec {
            weight: w,
            beta: InputFunction::affine(offsets.to_vec(), 0.0),
        }],
        vec![-1.0],
        InputFunction::affine(vec![1.0], 0.0),
    )
    .expect("static net is valid");
    let reps = letters
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut u = vec![0.0; letters.len()];
            u[i] = 1.0;
            (l.clone(), u)
        })
        .collect();
    let alphabet = GroundedAlphabet {
        letters,
        reps,
        identity: Some("e".into()),
        output_bands: vec![OutputBand::new(-2.0, 0.0, "0"), OutputBand::new(0.0, 2.0, "1")],
    };
    GroundedNet::new(net, alphabet).expect("static alphabet is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum FixtureKind {
    Dfa(Automaton),
    /// A network together with the automaton it should implement.
    Net { net: GroundedNet, reference: Automaton },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Name understood by [`Oracle::from_name`].
    pub oracle: &'static str,
    pub kind: FixtureKind,
}

impl FixtureEntry {
    pub fn automaton(&self) -> &Automaton {
        match &self.kind {
            FixtureKind::Dfa(a) => a,
            FixtureKind::Net { reference, .. } => reference,
        }
    }

    pub fn net(&self) -> Option<&GroundedNet> {
        match &self.kind {
            FixtureKind::Dfa(_) => None,
            FixtureKind::Net { net, .. } => Some(net),
        }
    }
}

pub const GRID_START: Cell = (1, 1);
pub const GRID_GOAL: Cell = (3, 3);
pub const PRODUCT_CAP: u64 = 12;

/// Every fixture, DFAs first, in a fixed order.
pub fn catalog() -> Vec<FixtureEntry> {
    let dfa = |name, description, oracle, a| FixtureEntry {
        name,
        description,
        oracle,
        kind: FixtureKind::Dfa(a),
    };
    let net = |name, description, oracle, net, reference| FixtureEntry {
        name,
        description,
        oracle,
        kind: FixtureKind::Net { net, reference },
    };
    let modk = |k| dfa_sum_mod_k(k).expect("modulus at least 2");
    vec![
        dfa("diamond_p", "p has occurred", "diamond_p", dfa_diamond_p()),
        dfa("p_since_q", "p at every step since the latest q", "p_since_q", dfa_p_since_q()),
        dfa("p_then_q", "p occurred, and q at some later step", "p_then_q", dfa_p_then_q()),
        dfa(
            "grid_3x3",
            "agent on a clamped 3x3 grid, from (1,1), rewarded on (3,3)",
            "grid_3x3",
            dfa_grid(3, 3, GRID_START, GRID_GOAL).expect("cells inside the grid"),
        ),
        dfa("sum_mod_2", "sum of digits modulo 2", "sum_mod_2", modk(2)),
        dfa("sum_mod_3", "sum of digits modulo 3", "sum_mod_3", modk(3)),
        dfa("sum_mod_7", "sum of digits 0..6 modulo 7", "sum_mod_7", modk(7)),
        dfa("sum_bits_eq_16", "bits summing to exactly 16", "sum_bits_eq_16", dfa_sum_bits_eq(16)),
        dfa(
            "product_capped_12",
            "product of digits 0..3, exact up to 12",
            "product_capped_12",
            dfa_product_capped(PRODUCT_CAP).expect("positive cap"),
        ),
        net(
            "latch_diamond_p",
            "one latch set by {p}",
            "diamond_p",
            net_diamond_p(),
            dfa_diamond_p(),
        ),
        net(
            "net_p_since_q",
            "one latch set by q and cleared by the empty set",
            "p_since_q",
            net_p_since_q(),
            dfa_p_since_q(),
        ),
        net(
            "net_p_then_q",
            "two latches, the second guarded by the first",
            "p_then_q",
            net_p_then_q(),
            dfa_p_then_q(),
        ),
    ]
}

pub fn fixture(name: &str) -> Result<FixtureEntry, FixtureError> {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))
}

/// Reference functions computed directly from their definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Oracle {
    DiamondP,
    PSinceQ,
    PThenQ,
    Grid { n: usize, m: usize, start: Cell, goal: Cell },
    SumModK(u64),
    SumBitsEq(u64),
    ProductCapped(u64),
    /// Sum of integers. Not regular.
    IntegerSum,
    /// Product of naturals. Not regular.
    NaturalProduct,
    /// Sign of a sum of reals. Not regular.
    RealSumSign,
    /// Sign of a sum of increments in {−1, 0, +1}. Not regular.
    IncrementSumSign,
    /// Unbounded grid walk from the origin, rewarded at `goal`. Not regular.
    UnboundedGrid { goal: (i64, i64) },
}

impl Oracle {
    /// Recognized names: `diamond_p`, `p_since_q`, `p_then_q`, `grid_NxM`,
    /// `sum_mod_K`, `sum_bits_eq_T`, `product_capped_C`, `integer_sum`,
    /// `natural_product`, `real_sum_sign`, `increment_sum_sign`,
    /// `unbounded_grid`. Net fixture names resolve to their reference.
    pub fn from_name(name: &str) -> Result<Oracle, FixtureError> {
        let unknown = || FixtureError::UnknownFixture(name.to_string());
        let num = |s: &str| s.parse::<u64>().map_err(|_| unknown());
        Ok(match name {
            "diamond_p" | "latch_diamond_p" => Oracle::DiamondP,
            "p_since_q" | "net_p_since_q" => Oracle::PSinceQ,
            "p_then_q" | "net_p_then_q" => Oracle::PThenQ,
            "integer_sum" => Oracle::IntegerSum,
            "natural_product" => Oracle::NaturalProduct,
            "real_sum_sign" => Oracle::RealSumSign,
            "increment_sum_sign" => Oracle::IncrementSumSign,
            "unbounded_grid" => Oracle::UnboundedGrid { goal: (2, 1) },
            _ => {
                if let Some(k) = name.strip_prefix("sum_mod_") {
                    Oracle::SumModK(num(k)?)
                } else if let Some(t) = name.strip_prefix("sum_bits_eq_") {
                    Oracle::SumBitsEq(num(t)?)
                } else if let Some(c) = name.strip_prefix("product_capped_") {
                    Oracle::ProductCapped(num(c)?)
                } else if let Some(dims) = name.strip_prefix("grid_") {
                    let (n, m) = dims.split_once('x').ok_or_else(unknown)?;
                    let (n, m) = (num(n)? as usize, num(m)? as usize);
                    if n == 0 || m == 0 {
                        return Err(unknown());
                    }
                    Oracle::Grid {
                        n,
                        m,
                        start: GRID_START,
                        goal: (n, m),
                    }
                } else {
                    return Err(unknown());
                }
            }
        })
    }

    /// The output after reading `word`.
    pub fn output<S: AsRef<str>>(&self, word: &[S]) -> Result<String, FixtureError> {
        let tokens: Vec<&str> = word.iter().map(AsRef::as_ref).collect();
        let bad = |t: &str| FixtureError::InvalidWord {
            fixture: format!("{self:?}"),
            token: t.to_string(),
        };
        let int = |t: &str| t.parse::<i64>().map_err(|_| bad(t));
        let sign = |x: f64| {
            if x > 0.0 {
                "1"
            } else if x < 0.0 {
                "-1"
            } else {
                "0"
            }
            .to_string()
        };
        match self {
            Oracle::DiamondP => {
                let props = tokens.iter().map(|t| propositions(t).ok_or_else(|| bad(t))).collect::<Result<Vec<_>, _>>()?;
                Ok(acceptor(props.iter().any(|&(p, _)| p)))
            }
            Oracle::PSinceQ => {
                let props = tokens.iter().map(|t| propositions(t).ok_or_else(|| bad(t))).collect::<Result<Vec<_>, _>>()?;
                // Scan backwards: a q before any step without p.
                for &(p, q) in props.iter().rev() {
                    if q {
                        return Ok(acceptor(true));
                    }
                    if !p {
                        return Ok(acceptor(false));
                    }
                }
                Ok(acceptor(false))
            }
            Oracle::PThenQ => {
                let props = tokens.iter().map(|t| propositions(t).ok_or_else(|| bad(t))).collect::<Result<Vec<_>, _>>()?;
                let first_p = props.iter().position(|&(p, _)| p);
                Ok(acceptor(
                    first_p.is_some_and(|i| props[i + 1..].iter().any(|&(_, q)| q)),
                ))
            }
            Oracle::Grid { n, m, start, goal } => {
                let (mut x, mut y) = (start.0 as i64, start.1 as i64);
                for t in &tokens {
                    match *t {
                        "stayed" => {}
                        "left" => x -= 1,
                        "right" => x += 1,
                        "up" => y += 1,
                        "down" => y -= 1,
                        _ => return Err(bad(t)),
                    }
                    x = x.clamp(1, *n as i64);
                    y = y.clamp(1, *m as i64);
                }
                Ok(acceptor((x, y) == (goal.0 as i64, goal.1 as i64)))
            }
            Oracle::SumModK(k) => {
                let mut s = 0u64;
                for t in &tokens {
                    match t.parse::<u64>() {
                        Ok(a) if a < *k => s += a,
                        _ => return Err(bad(t)),
                    }
                }
                Ok((s % k).to_string())
            }
            Oracle::SumBitsEq(target) => {
                let mut s = 0u64;
                for t in &tokens {
                    match *t {
                        "0" => {}
                        "1" => s += 1,
                        _ => return Err(bad(t)),
                    }
                }
                Ok(acceptor(s == *target))
            }
            Oracle::ProductCapped(cap) => {
                let mut digits = Vec::with_capacity(tokens.len());
                for t in &tokens {
                    match t.parse::<u64>() {
                        Ok(a) if a <= 3 => digits.push(a),
                        _ => return Err(bad(t)),
                    }
                }
                if digits.contains(&0) {
                    return Ok("0".into());
                }
                let mut prod = 1u64;
                for a in digits {
                    prod = prod.saturating_mul(a);
                }
                Ok(if prod <= *cap {
                    prod.to_string()
                } else {
                    OVER_CAP.to_string()
                })
            }
            Oracle::IntegerSum => {
                let mut s = 0i128;
                for t in &tokens {
                    s += int(t)? as i128;
                }
                Ok(s.to_string())
            }
            Oracle::NaturalProduct => {
                let mut prod: u128 = 1;
                for t in &tokens {
                    let a = t.parse::<u64>().map_err(|_| bad(t))?;
                    prod = prod.saturating_mul(a as u128);
                }
                Ok(prod.to_string())
            }
            Oracle::RealSumSign => {
                let mut s = 0.0;
                for t in &tokens {
                    s += t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(t))?;
                }
                Ok(sign(s))
            }
            Oracle::IncrementSumSign => {
                let mut s = 0i64;
                for t in &tokens {
                    match int(t)? {
                        z @ -1..=1 => s += z,
                        _ => return Err(bad(t)),
                    }
                }
                Ok(sign(s as f64))
            }
            Oracle::UnboundedGrid { goal } => {
                let (mut x, mut y) = (0i64, 0i64);
                for t in &tokens {
                    match *t {
                        "stayed" => {}
                        "left" => x -= 1,
                        "right" => x += 1,
                        "up" => y += 1,
                        "down" => y -= 1,
                        _ => return Err(bad(t)),
                    }
                }
                Ok(acceptor((x, y) == *goal))
            }
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `(p ∈ letter, q ∈ letter)` for `∅` or a braced, comma-separated set.
fn propositions(letter: &str) -> Option<(bool, bool)> {
    if letter == EMPTY {
        return Some((false, false));
    }
    let inner = letter.strip_prefix('{')?.strip_suffix('}')?;
    let (mut p, mut q) = (false, false);
    for atom in inner.split(',') {
        match atom.trim() {
            "p" => p = true,
            "q" => q = true,
            _ => return None,
        }
    }
    Some((p, q))
}

/// Output of the named fixture's oracle on `word`.
pub fn brute_membership<S: AsRef<str>>(name: &str, word: &[S]) -> Result<String, FixtureError> {
    Oracle::from_name(name)?.output(word)
}
