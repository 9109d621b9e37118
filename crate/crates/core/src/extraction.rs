//! Extraction of a cascade of three-state semiautomata from a positive-weight
//! tanh cascade.
//!
//! A network state is named by a [`DigitTuple`]: the state is settled under
//! the identity letter and each coordinate of the limit is classified against
//! its neuron's pivots. Exploration starts from the initial state and, for
//! every discovered tuple, steps its stored representative with each letter.
//! The observed successor digits fill the transition tables of the levels;
//! entries never observed become self-loops.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    net_equivalent, Automaton, AutomatonError, CascadeLevel, Counterexample, Equivalence, SemiCascade,
    SweepConfig,
};
use crate::dynamics::{validate_rncp, DynamicsError, GroundedNet, RncpViolation};
use crate::tanh_analysis::{classify, kappa, pivots, Classification, Digit};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractionError {
    #[error("network is not RNC+ (non-positive weights at neurons {})", fmt_violations(.0))]
    NotRncPlus(Vec<RncpViolation>),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

fn fmt_violations(v: &[RncpViolation]) -> String {
    v.iter().map(|v| v.neuron.to_string()).collect::<Vec<_>>().join(", ")
}

/// One digit per neuron.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitTuple(pub Vec<Digit>);

impl DigitTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based state indices, as used by the cascade levels.
    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|d| d.index()).collect()
    }
}

impl fmt::Display for DigitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Digit::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub settle_tol: f64,
    pub digit_margin: f64,
    pub rep_consistency_tol: f64,
    pub max_settle_iter: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            settle_tol: 1e-12,
            digit_margin: 1e-6,
            rep_consistency_tol: 1e-7,
            max_settle_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Diagnostic {
    /// A settled coordinate fell within the digit margin of a pivot and was
    /// resolved by κ's closed boundaries.
    AmbiguousDigit {
        tuple: DigitTuple,
        neuron: usize,
        value: f64,
        resolved: Digit,
    },
    /// Two network states with the same tuple settled to different limits.
    RepresentativeMismatch {
        tuple: DigitTuple,
        neuron: usize,
        stored: f64,
        observed: f64,
    },
    /// A level transition observed with two different successors.
    TransitionConflict {
        level: usize,
        state: Digit,
        letter: String,
        prefix: Vec<Digit>,
        recorded: Digit,
        observed: Digit,
    },
    /// Level entries never exercised, completed as self-loops.
    DummyTransitionUsed { level: usize, count: usize },
    /// A representative's raw output differs from the output at its limit.
    OutputMismatch {
        tuple: DigitTuple,
        raw: String,
        settled: String,
    },
}

impl Diagnostic {
    /// Diagnostics that contradict the well-definedness of the extraction.
    pub fn is_unsound(&self) -> bool {
        matches!(
            self,
            Diagnostic::RepresentativeMismatch { .. } | Diagnostic::TransitionConflict { .. }
        )
    }
}

/// A network state standing for a digit tuple, with its settled limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    pub tuple: DigitTuple,
    pub state: Vec<f64>,
    pub limit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub config: ExtractionConfig,
    pub neurons: usize,
    pub cascade: SemiCascade,
    /// Reached tuples only; state `i` is `representatives[i].tuple`.
    pub flat: Automaton,
    pub representatives: Vec<Representative>,
    pub diagnostics: Vec<Diagnostic>,
    pub state_count: usize,
}

impl ExtractionReport {
    pub fn count(&self, pred: impl Fn(&Diagnostic) -> bool) -> usize {
        self.diagnostics.iter().filter(|d| pred(d)).count()
    }

    pub fn representative_mismatches(&self) -> usize {
        self.count(|d| matches!(d, Diagnostic::RepresentativeMismatch { .. }))
    }

    pub fn is_sound(&self) -> bool {
        !self.diagnostics.iter().any(Diagnostic::is_unsound)
    }

    /// `3^n`.
    pub fn state_bound(&self) -> usize {
        3usize.saturating_pow(self.neurons as u32)
    }
}

/// Result of digitizing one network state.
#[derive(Debug, Clone, PartialEq)]
pub struct Digitization {
    pub tuple: DigitTuple,
    pub limit: Vec<f64>,
    /// `(one-based neuron, settled value)` for coordinates within the margin.
    pub ambiguous: Vec<(usize, f64)>,
}

fn require_rncp(net: &GroundedNet) -> Result<(), ExtractionError> {
    validate_rncp(&net.net).map_err(ExtractionError::NotRncPlus)
}

fn digitize(net: &GroundedNet, x: &[f64], cfg: &ExtractionConfig) -> Result<Digitization, ExtractionError> {
    let settled = net.settle(x, cfg.settle_tol, cfg.max_settle_iter)?;
    let mut ambiguous = Vec::new();
    let digits = net
        .net
        .neurons()
        .iter()
        .zip(&settled.limit)
        .enumerate()
        .map(|(i, (neuron, &value))| match pivots(neuron.weight) {
            // Contractive: a unique fixpoint, so the digit is uninformative.
            Err(_) => Digit::Two,
            Ok(p) => match classify(value, &p, cfg.digit_margin) {
                Classification::Digit(d) => d,
                Classification::Ambiguous => {
                    ambiguous.push((i + 1, value));
                    kappa(value, &p)
                }
            },
        })
        .collect();
    Ok(Digitization {
        tuple: DigitTuple(digits),
        limit: settled.limit,
        ambiguous,
    })
}

/// The digit tuple of a network state.
pub fn eta(net: &GroundedNet, x: &[f64], cfg: &ExtractionConfig) -> Result<Digitization, ExtractionError> {
    require_rncp(net)?;
    digitize(net, x, cfg)
}

struct Explorer<'a> {
    net: &'a GroundedNet,
    cfg: &'a ExtractionConfig,
    letters: usize,
    /// `tables[level][state][compound letter]`.
    tables: Vec<Vec<Vec<Option<Digit>>>>,
    index: HashMap<DigitTuple, usize>,
    reps: Vec<Representative>,
    diagnostics: Vec<Diagnostic>,
}

impl Explorer<'_> {
    fn compound(&self, letter: usize, prefix: &[Digit]) -> usize {
        letter + self.letters * prefix.iter().fold(0, |acc, d| acc * 3 + d.index())
    }

    fn digitize(&mut self, x: &[f64]) -> Result<Digitization, ExtractionError> {
        let dz = digitize(self.net, x, self.cfg)?;
        for &(neuron, value) in &dz.ambiguous {
            self.diagnostics.push(Diagnostic::AmbiguousDigit {
                tuple: dz.tuple.clone(),
                neuron,
                value,
                resolved: dz.tuple.0[neuron - 1],
            });
        }
        Ok(dz)
    }

    /// Index of the tuple, registering `x` as its representative if new.
    fn intern(&mut self, x: Vec<f64>, dz: Digitization) -> usize {
        if let Some(&i) = self.index.get(&dz.tuple) {
            let stored = &self.reps[i].limit;
            for (neuron, (&a, &b)) in stored.iter().zip(&dz.limit).enumerate() {
                if (a - b).abs() > self.cfg.rep_consistency_tol {
                    self.diagnostics.push(Diagnostic::RepresentativeMismatch {
                        tuple: dz.tuple.clone(),
                        neuron: neuron + 1,
                        stored: a,
                        observed: b,
                    });
                }
            }
            return i;
        }
        let i = self.reps.len();
        self.index.insert(dz.tuple.clone(), i);
        self.reps.push(Representative {
            tuple: dz.tuple,
            state: x,
            limit: dz.limit,
        });
        i
    }

    fn record(&mut self, from: &DigitTuple, letter: usize, to: &DigitTuple) {
        for level in 0..from.len() {
            let c = self.compound(letter, &from.0[..level]);
            let slot = &mut self.tables[level][from.0[level].index()][c];
            match *slot {
                None => *slot = Some(to.0[level]),
                Some(prev) if prev != to.0[level] => {
                    self.diagnostics.push(Diagnostic::TransitionConflict {
                        level: level + 1,
                        state: from.0[level],
                        letter: self.net.alphabet.letters[letter].clone(),
                        prefix: from.0[..level].to_vec(),
                        recorded: prev,
                        observed: to.0[level],
                    });
                }
                Some(_) => {}
            }
        }
    }
}

/// Breadth-first extraction over digit tuples, letters in alphabet order.
pub fn extract(net: &GroundedNet, cfg: &ExtractionConfig) -> Result<ExtractionReport, ExtractionError> {
    require_rncp(net)?;
    net.alphabet.identity_rep()?;
    let n = net.net.len();
    let letters = net.alphabet.letters.len();
    let reps_in: Vec<&[f64]> = net
        .alphabet
        .letters
        .iter()
        .map(|l| net.alphabet.rep(l))
        .collect::<Result<_, _>>()?;

    let mut ex = Explorer {
        net,
        cfg,
        letters,
        tables: (0..n)
            .map(|level| vec![vec![None; letters * 3usize.pow(level as u32)]; 3])
            .collect(),
        index: HashMap::new(),
        reps: Vec::new(),
        diagnostics: Vec::new(),
    };

    let init = net.net.initial_state().to_vec();
    let dz = ex.digitize(&init)?;
    ex.intern(init, dz);

    let mut flat_delta: Vec<Vec<usize>> = Vec::new();
    let mut cursor = 0;
    while cursor < ex.reps.len() {
        let from = ex.reps[cursor].tuple.clone();
        let x = ex.reps[cursor].state.clone();
        let mut row = Vec::with_capacity(letters);
        for (letter, u) in reps_in.iter().enumerate() {
            let next = net.net.step(&x, u)?;
            let dz = ex.digitize(&next)?;
            ex.record(&from, letter, &dz.tuple);
            row.push(ex.intern(next, dz));
        }
        flat_delta.push(row);
        cursor += 1;
    }

    // Unobserved level entries become self-loops.
    let mut levels = Vec::with_capacity(n);
    for (level, table) in ex.tables.iter().enumerate() {
        let mut dummies = 0;
        let delta = table
            .iter()
            .enumerate()
            .map(|(state, row)| {
                row.iter()
                    .map(|slot| {
                        slot.map(Digit::index).unwrap_or_else(|| {
                            dummies += 1;
                            state
                        })
                    })
                    .collect()
            })
            .collect();
        if dummies > 0 {
            ex.diagnostics.push(Diagnostic::DummyTransitionUsed {
                level: level + 1,
                count: dummies,
            });
        }
        levels.push(CascadeLevel { states: 3, delta });
    }
    let cascade = SemiCascade::new(net.alphabet.letters.clone(), levels)?;

    let mut outputs = Vec::with_capacity(ex.reps.len());
    for rep in &ex.reps {
        let settled = net.output_letter(&rep.limit)?.to_string();
        let raw = net.output_letter(&rep.state)?.to_string();
        if raw != settled {
            ex.diagnostics.push(Diagnostic::OutputMismatch {
                tuple: rep.tuple.clone(),
                raw,
                settled: settled.clone(),
            });
        }
        outputs.push(settled);
    }
    let flat = Automaton::from_table(net.alphabet.letters.clone(), flat_delta, 0, outputs)?;

    Ok(ExtractionReport {
        config: *cfg,
        neurons: n,
        cascade,
        state_count: ex.reps.len(),
        flat,
        representatives: ex.reps,
        diagnostics: ex.diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The report carries diagnostics contradicting well-definedness.
    Unsound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub verdict: Verdict,
    pub checks: Vec<CheckResult>,
}

impl VerificationSummary {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Empirical checks of an extraction against its network. Failures are
/// reported in the summary, never as errors.
pub fn verify_extraction(net: &GroundedNet, report: &ExtractionReport, sweep: &SweepConfig) -> VerificationSummary {
    let mut checks = Vec::new();

    let bound = report.state_bound();
    checks.push(CheckResult {
        name: "state_bound".into(),
        passed: report.state_count <= bound,
        detail: format!("{} reached tuples, bound 3^{} = {}", report.state_count, report.neurons, bound),
        counterexample: None,
    });

    let unsound: Vec<&Diagnostic> = report.diagnostics.iter().filter(|d| d.is_unsound()).collect();
    checks.push(CheckResult {
        name: "consistency".into(),
        passed: unsound.is_empty(),
        detail: format!("{} representative mismatches or transition conflicts", unsound.len()),
        counterexample: None,
    });

    let (passed, detail, counterexample) = match net_equivalent(net, &report.flat, sweep) {
        Ok(Equivalence::Equal) => (
            true,
            format!(
                "no mismatch up to length {} and on {} random words",
                sweep.max_len, sweep.random_trials
            ),
            None,
        ),
        Ok(Equivalence::Counterexample(c)) => (
            false,
            format!("network outputs {:?}, automaton outputs {:?}", c.left, c.right),
            Some(c),
        ),
        Err(e) => (false, e.to_string(), None),
    };
    checks.push(CheckResult {
        name: "net_equivalence".into(),
        passed,
        detail,
        counterexample,
    });

    let identity = net.alphabet.identity.clone();
    let (passed, detail) = match &identity {
        None => (false, "no identity letter".to_string()),
        Some(e) => {
            let loops = report
                .flat
                .semiautomaton()
                .is_identity_transformation(e)
                .unwrap_or(false);
            (loops, format!("{e:?} is a self-loop on every reached tuple: {loops}"))
        }
    };
    checks.push(CheckResult {
        name: "identity_self_loops".into(),
        passed,
        detail,
        counterexample: None,
    });

    let (passed, detail) = match &identity {
        None => (false, "no identity letter".to_string()),
        Some(e) => {
            let ids = report.flat.identity_letters();
            (
                ids.contains(e),
                format!("identity transformations of the minimal automaton: {ids:?}"),
            )
        }
    };
    checks.push(CheckResult {
        name: "identity_transformation".into(),
        passed,
        detail,
        counterexample: None,
    });

    let verdict = if !unsound.is_empty() {
        Verdict::Unsound
    } else if checks.iter().all(|c| c.passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    VerificationSummary { verdict, checks }
}
