//! Finite semiautomata and Moore automata over named letters.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::DynamicsError;

mod cascade;
mod dot;
mod equivalence;
mod minimize;
mod monoid;

pub use cascade::{CascadeLevel, SemiCascade};
pub use equivalence::{equivalent, net_equivalent, Counterexample, Equivalence, SweepConfig};
pub use monoid::{AperiodicityReport, AperiodicityWitness, Transformation, TransitionMonoid, DEFAULT_MONOID_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("transition monoid exceeds {cap} elements")]
    CapExceeded { cap: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Alphabet, states `0..n` and a total transition table `delta[state][letter]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Semiautomaton {
    alphabet: Vec<String>,
    delta: Vec<Vec<usize>>,
}

impl Semiautomaton {
    pub fn new(alphabet: Vec<String>, delta: Vec<Vec<usize>>) -> Result<Self, AutomatonError> {
        let unique: BTreeSet<_> = alphabet.iter().collect();
        if unique.len() != alphabet.len() {
            return Err(AutomatonError::Invalid("duplicate letters".into()));
        }
        if alphabet.is_empty() {
            return Err(AutomatonError::Invalid("empty alphabet".into()));
        }
        if delta.is_empty() {
            return Err(AutomatonError::Invalid("no states".into()));
        }
        let n = delta.len();
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(AutomatonError::Invalid(format!(
                    "state {q} has {} transitions for {} letters",
                    row.len(),
                    alphabet.len()
                )));
            }
            if let Some(t) = row.iter().find(|&&t| t >= n) {
                return Err(AutomatonError::Invalid(format!("state {q} targets missing state {t}")));
            }
        }
        Ok(Self { alphabet, delta })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn delta(&self) -> &[Vec<usize>] {
        &self.delta
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    fn require_letter(&self, letter: &str) -> Result<usize, AutomatonError> {
        self.letter_index(letter)
            .ok_or_else(|| AutomatonError::UnknownLetter(letter.to_string()))
    }

    #[inline]
    pub fn next(&self, q: usize, letter: usize) -> usize {
        self.delta[q][letter]
    }

    pub fn run_from(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |q, &a| self.delta[q][a])
    }

    /// The map `q ↦ δ(q, letter)`.
    pub fn transformation(&self, letter: usize) -> Transformation {
        Transformation(self.delta.iter().map(|row| row[letter]).collect())
    }

    /// True iff `letter` fixes every state.
    pub fn is_identity_transformation(&self, letter: &str) -> Result<bool, AutomatonError> {
        let a = self.require_letter(letter)?;
        Ok(self.delta.iter().enumerate().all(|(q, row)| row[a] == q))
    }

    pub fn parse_word<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>, AutomatonError> {
        word.iter().map(|l| self.require_letter(l.as_ref())).collect()
    }
}

/// A semiautomaton with an initial state and a Moore output labelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AutomatonRepr", into = "AutomatonRepr")]
pub struct Automaton {
    semi: Semiautomaton,
    initial: usize,
    outputs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonRepr {
    alphabet: Vec<String>,
    states: usize,
    delta: Vec<Vec<usize>>,
    initial: usize,
    outputs: Vec<String>,
}

impl TryFrom<AutomatonRepr> for Automaton {
    type Error = AutomatonError;

    fn try_from(r: AutomatonRepr) -> Result<Self, Self::Error> {
        if r.delta.len() != r.states {
            return Err(AutomatonError::Invalid(format!(
                "declared {} states but delta has {} rows",
                r.states,
                r.delta.len()
            )));
        }
        Automaton::new(Semiautomaton::new(r.alphabet, r.delta)?, r.initial, r.outputs)
    }
}

impl From<Automaton> for AutomatonRepr {
    fn from(a: Automaton) -> Self {
        AutomatonRepr {
            states: a.semi.num_states(),
            alphabet: a.semi.alphabet,
            delta: a.semi.delta,
            initial: a.initial,
            outputs: a.outputs,
        }
    }
}

impl Automaton {
    pub fn new(semi: Semiautomaton, initial: usize, outputs: Vec<String>) -> Result<Self, AutomatonError> {
        if initial >= semi.num_states() {
            return Err(AutomatonError::Invalid(format!("initial state {initial} out of range")));
        }
        if outputs.len() != semi.num_states() {
            return Err(AutomatonError::Invalid(format!(
                "{} outputs for {} states",
                outputs.len(),
                semi.num_states()
            )));
        }
        Ok(Self {
            semi,
            initial,
            outputs,
        })
    }

    /// Builds an automaton from a table of letter names and a per-state output.
    pub fn from_table<S: Into<String>>(
        alphabet: impl IntoIterator<Item = S>,
        delta: Vec<Vec<usize>>,
        initial: usize,
        outputs: impl IntoIterator<Item = S>,
    ) -> Result<Self, AutomatonError> {
        let semi = Semiautomaton::new(alphabet.into_iter().map(Into::into).collect(), delta)?;
        Automaton::new(semi, initial, outputs.into_iter().map(Into::into).collect())
    }

    pub fn semiautomaton(&self) -> &Semiautomaton {
        &self.semi
    }

    pub fn alphabet(&self) -> &[String] {
        self.semi.alphabet()
    }

    pub fn num_states(&self) -> usize {
        self.semi.num_states()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn output(&self, q: usize) -> &str {
        &self.outputs[q]
    }

    /// Output after reading a word of letter indices.
    pub fn output_of(&self, word: &[usize]) -> &str {
        self.output(self.semi.run_from(self.initial, word))
    }

    /// Output after reading a word of letter names.
    pub fn run<S: AsRef<str>>(&self, word: &[S]) -> Result<&str, AutomatonError> {
        Ok(self.output_of(&self.semi.parse_word(word)?))
    }

    /// Restriction to the states reachable from the initial state, renumbered
    /// in breadth-first order (letters in alphabet order).
    pub fn reachable(&self) -> Automaton {
        let n = self.num_states();
        let mut order = Vec::with_capacity(n);
        let mut index = vec![usize::MAX; n];
        let mut queue = VecDeque::from([self.initial]);
        index[self.initial] = 0;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &t in &self.semi.delta[q] {
                if index[t] == usize::MAX {
                    index[t] = order.len() + queue.len();
                    queue.push_back(t);
                }
            }
        }
        let delta = order
            .iter()
            .map(|&q| self.semi.delta[q].iter().map(|&t| index[t]).collect())
            .collect();
        Automaton {
            semi: Semiautomaton {
                alphabet: self.semi.alphabet.clone(),
                delta,
            },
            initial: 0,
            outputs: order.iter().map(|&q| self.outputs[q].clone()).collect(),
        }
    }

    /// True iff both automata have the same canonical reachable form.
    pub fn is_isomorphic(&self, other: &Automaton) -> bool {
        self.reachable() == other.reachable()
    }

    /// Letters acting as the identity on the canonical (minimal) automaton.
    /// For a function given by an automaton these are exactly its identity
    /// elements.
    pub fn identity_letters(&self) -> Vec<String> {
        let m = self.minimize();
        m.alphabet()
            .iter()
            .filter(|l| m.semi.is_identity_transformation(l).unwrap_or(false))
            .cloned()
            .collect()
    }

    pub fn to_dot(&self) -> String {
        dot::automaton_to_dot(self)
    }
}
