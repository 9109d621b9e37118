//! Behavioural equivalence: exact product search between automata, and an
//! exhaustive-plus-random sweep between a grounded network and an automaton.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Automaton, AutomatonError};
use crate::dynamics::{DynamicsError, GroundedNet};

/// A word on which two systems disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub word: Vec<String>,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Equivalence {
    Equal,
    Counterexample(Counterexample),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Equivalence::Equal => None,
            Equivalence::Counterexample(c) => Some(c),
        }
    }
}

/// Maps each letter of `left` to its index in `right`.
fn letter_map(left: &[String], right: &[String]) -> Result<Vec<usize>, AutomatonError> {
    let l: BTreeSet<_> = left.iter().collect();
    let r: BTreeSet<_> = right.iter().collect();
    if l != r || left.len() != right.len() {
        return Err(AutomatonError::AlphabetMismatch {
            left: left.to_vec(),
            right: right.to_vec(),
        });
    }
    Ok(left
        .iter()
        .map(|x| right.iter().position(|y| y == x).unwrap())
        .collect())
}

/// Breadth-first search of the product of `a` and `b`. The counterexample,
/// if any, is the shortest distinguishing word and the least one in `a`'s
/// letter order among those.
pub fn equivalent(a: &Automaton, b: &Automaton) -> Result<Equivalence, AutomatonError> {
    let map = letter_map(a.alphabet(), b.alphabet())?;
    let (na, nb) = (a.num_states(), b.num_states());
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; na * nb];
    let mut seen = vec![false; na * nb];
    let start = a.initial() * nb + b.initial();
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        let (p, q) = (pair / nb, pair % nb);
        if a.output(p) != b.output(q) {
            let mut word = Vec::new();
            let mut cur = pair;
            while let Some((prev, letter)) = parent[cur] {
                word.push(a.alphabet()[letter].clone());
                cur = prev;
            }
            word.reverse();
            return Ok(Equivalence::Counterexample(Counterexample {
                word,
                left: a.output(p).to_string(),
                right: b.output(q).to_string(),
            }));
        }
        for (letter, &mapped) in map.iter().enumerate() {
            let next = a.semiautomaton().next(p, letter) * nb + b.semiautomaton().next(q, mapped);
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((pair, letter));
                queue.push_back(next);
            }
        }
    }
    Ok(Equivalence::Equal)
}

/// Parameters of a network-versus-automaton sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    /// Every word up to this length is checked.
    pub max_len: usize,
    /// Random words of length up to `8 · max_len` checked afterwards.
    pub random_trials: usize,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_len: 10,
            random_trials: 10_000,
            seed: 0,
            jobs: 1,
        }
    }
}

/// A mismatch found by a worker, as automaton letter indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Mismatch {
    len: usize,
    word: Vec<usize>,
}

struct Sweep<'a> {
    net: &'a GroundedNet,
    automaton: &'a Automaton,
    /// Representative input vector for each automaton letter.
    reps: Vec<&'a [f64]>,
}

impl Sweep<'_> {
    fn net_output(&self, x: &[f64]) -> Result<&str, DynamicsError> {
        self.net.output_letter(x)
    }

    fn mismatch_at(&self, x: &[f64], q: usize) -> Result<bool, DynamicsError> {
        Ok(self.net_output(x)? != self.automaton.output(q))
    }

    /// Lexicographic depth-first sweep below `word`, keeping the shortest
    /// (then least) mismatch.
    fn dfs(
        &self,
        x: &[f64],
        q: usize,
        word: &mut Vec<usize>,
        max_len: usize,
        best: &mut Option<Mismatch>,
    ) -> Result<(), DynamicsError> {
        if best.as_ref().is_some_and(|b| word.len() >= b.len) {
            return Ok(());
        }
        if self.mismatch_at(x, q)? {
            *best = Some(Mismatch {
                len: word.len(),
                word: word.clone(),
            });
            return Ok(());
        }
        if word.len() == max_len {
            return Ok(());
        }
        let mut buf = Vec::new();
        let mut next = vec![0.0; x.len()];
        for (letter, rep) in self.reps.iter().enumerate() {
            self.net.net.step_into(x, rep, &mut buf, &mut next);
            word.push(letter);
            self.dfs(&next, self.automaton.semiautomaton().next(q, letter), word, max_len, best)?;
            word.pop();
        }
        Ok(())
    }

    /// First prefix of `word` on which the outputs differ.
    fn check_word(&self, word: &[usize]) -> Result<Option<Mismatch>, DynamicsError> {
        let mut x = self.net.net.initial_state().to_vec();
        let mut q = self.automaton.initial();
        let mut buf = Vec::new();
        let mut next = vec![0.0; x.len()];
        for t in 0..=word.len() {
            if self.mismatch_at(&x, q)? {
                return Ok(Some(Mismatch {
                    len: t,
                    word: word[..t].to_vec(),
                }));
            }
            if t < word.len() {
                self.net.net.step_into(&x, self.reps[word[t]], &mut buf, &mut next);
                std::mem::swap(&mut x, &mut next);
                q = self.automaton.semiautomaton().next(q, word[t]);
            }
        }
        Ok(None)
    }
}

fn least(results: Vec<Result<Option<Mismatch>, DynamicsError>>) -> Result<Option<Mismatch>, DynamicsError> {
    let mut best: Option<Mismatch> = None;
    for r in results {
        if let Some(m) = r? {
            if best.as_ref().is_none_or(|b| m < *b) {
                best = Some(m);
            }
        }
    }
    Ok(best)
}

/// Compares the grounded network against the automaton on every word up to
/// `max_len`, then on `random_trials` random words. `Equal` means no mismatch
/// was found; it is evidence, not a proof.
pub fn net_equivalent(
    net: &GroundedNet,
    automaton: &Automaton,
    cfg: &SweepConfig,
) -> Result<Equivalence, AutomatonError> {
    letter_map(automaton.alphabet(), &net.alphabet.letters)?;
    let reps = automaton
        .alphabet()
        .iter()
        .map(|l| net.alphabet.rep(l))
        .collect::<Result<Vec<_>, _>>()?;
    let sweep = Sweep { net, automaton, reps };
    let k = automaton.alphabet().len();
    let jobs = cfg.jobs.max(1);
    let init = net.net.initial_state();

    // Exhaustive phase: the empty word, then one subtree per first letter,
    // dealt round-robin to workers.
    let mut found = if sweep.mismatch_at(init, automaton.initial())? {
        Some(Mismatch { len: 0, word: vec![] })
    } else {
        None
    };
    if found.is_none() && cfg.max_len > 0 {
        let subtree = |letter: usize| -> Result<Option<Mismatch>, DynamicsError> {
            let x = net.net.step(init, sweep.reps[letter])?;
            let q = automaton.semiautomaton().next(automaton.initial(), letter);
            let mut best = None;
            sweep.dfs(&x, q, &mut vec![letter], cfg.max_len, &mut best)?;
            Ok(best)
        };
        let results: Vec<_> = if jobs == 1 {
            (0..k).map(subtree).collect()
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..jobs)
                    .map(|j| {
                        let subtree = &subtree;
                        s.spawn(move || (j..k).step_by(jobs).map(subtree).collect::<Vec<_>>())
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
            })
        };
        found = least(results)?;
    }

    if found.is_none() && cfg.random_trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let max_random = 8 * cfg.max_len.max(1);
        let words: Vec<Vec<usize>> = (0..cfg.random_trials)
            .map(|_| {
                let len = rng.random_range(0..=max_random);
                (0..len).map(|_| rng.random_range(0..k)).collect()
            })
            .collect();
        let chunk = words.len().div_ceil(jobs);
        let results: Vec<_> = if jobs == 1 {
            words.iter().map(|w| sweep.check_word(w)).collect()
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = words
                    .chunks(chunk)
                    .map(|part| {
                        let sweep = &sweep;
                        s.spawn(move || part.iter().map(|w| sweep.check_word(w)).collect::<Vec<_>>())
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
            })
        };
        found = least(results)?;
    }

    Ok(match found {
        None => Equivalence::Equal,
        Some(m) => {
            let x = net.run(
                &m.word
                    .iter()
                    .map(|&a| automaton.alphabet()[a].as_str())
                    .collect::<Vec<_>>(),
            )?;
            Equivalence::Counterexample(Counterexample {
                word: m.word.iter().map(|&a| automaton.alphabet()[a].clone()).collect(),
                left: x.output,
                right: automaton.output_of(&m.word).to_string(),
            })
        }
    })
}
