use serde::{Deserialize, Serialize};

use super::{AutomatonError, Semiautomaton};

/// One level of a cascade. Its input letters are tuples
/// `⟨σ, q_1, …, q_{i−1}⟩`, encoded densely by [`SemiCascade::compound_letter`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeLevel {
    pub states: usize,
    /// `delta[state][compound letter]`.
    pub delta: Vec<Vec<usize>>,
}

/// A cascade `D_1 ⋉ … ⋉ D_n` of semiautomata over a shared input alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CascadeRepr", into = "CascadeRepr")]
pub struct SemiCascade {
    alphabet: Vec<String>,
    levels: Vec<CascadeLevel>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CascadeRepr {
    alphabet: Vec<String>,
    levels: Vec<CascadeLevel>,
}

impl TryFrom<CascadeRepr> for SemiCascade {
    type Error = AutomatonError;

    fn try_from(r: CascadeRepr) -> Result<Self, Self::Error> {
        SemiCascade::new(r.alphabet, r.levels)
    }
}

impl From<SemiCascade> for CascadeRepr {
    fn from(c: SemiCascade) -> Self {
        CascadeRepr {
            alphabet: c.alphabet,
            levels: c.levels,
        }
    }
}

impl SemiCascade {
    pub fn new(alphabet: Vec<String>, levels: Vec<CascadeLevel>) -> Result<Self, AutomatonError> {
        if alphabet.is_empty() {
            return Err(AutomatonError::Invalid("empty alphabet".into()));
        }
        let mut inputs = alphabet.len();
        for (i, level) in levels.iter().enumerate() {
            if level.states == 0 || level.delta.len() != level.states {
                return Err(AutomatonError::Invalid(format!("level {i}: state count mismatch")));
            }
            for row in &level.delta {
                if row.len() != inputs {
                    return Err(AutomatonError::Invalid(format!(
                        "level {i}: expected {inputs} compound letters, got {}",
                        row.len()
                    )));
                }
                if row.iter().any(|&t| t >= level.states) {
                    return Err(AutomatonError::Invalid(format!("level {i}: target out of range")));
                }
            }
            inputs *= level.states;
        }
        Ok(Self { alphabet, levels })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn levels(&self) -> &[CascadeLevel] {
        &self.levels
    }

    /// Dense index of `⟨letter, prefix⟩` at level `prefix.len()`; the prefix
    /// is read most-significant first.
    pub fn compound_letter(&self, letter: usize, prefix: &[usize]) -> usize {
        letter + self.alphabet.len() * self.mixed_radix(prefix)
    }

    fn mixed_radix(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.levels)
            .fold(0, |acc, (&q, level)| acc * level.states + q)
    }

    /// Index of a full state tuple in the flattened semiautomaton.
    pub fn flat_index(&self, state: &[usize]) -> usize {
        self.mixed_radix(state)
    }

    pub fn flat_state(&self, mut index: usize) -> Vec<usize> {
        let mut state = vec![0; self.levels.len()];
        for (slot, level) in state.iter_mut().zip(&self.levels).rev() {
            *slot = index % level.states;
            index /= level.states;
        }
        state
    }

    pub fn num_flat_states(&self) -> usize {
        self.levels.iter().map(|l| l.states).product()
    }

    /// Level-wise transition; every level reads the pre-transition prefix.
    pub fn step(&self, state: &[usize], letter: usize) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, level)| level.delta[state[i]][self.compound_letter(letter, &state[..i])])
            .collect()
    }

    /// The product semiautomaton over the external alphabet.
    pub fn flatten(&self) -> Semiautomaton {
        let delta = (0..self.num_flat_states())
            .map(|idx| {
                let state = self.flat_state(idx);
                (0..self.alphabet.len())
                    .map(|a| self.flat_index(&self.step(&state, a)))
                    .collect()
            })
            .collect();
        Semiautomaton {
            alphabet: self.alphabet.clone(),
            delta,
        }
    }

    /// Level `i` as a standalone semiautomaton with letters named
    /// `σ|q_1,…,q_{i−1}`.
    pub fn level_semiautomaton(&self, i: usize) -> Semiautomaton {
        let level = &self.levels[i];
        let prefixes: usize = self.levels[..i].iter().map(|l| l.states).product();
        let mut names = Vec::with_capacity(self.alphabet.len() * prefixes);
        for p in 0..prefixes {
            let mut rem = p;
            let mut prefix = vec![0; i];
            for (slot, l) in prefix.iter_mut().zip(&self.levels[..i]).rev() {
                *slot = rem % l.states;
                rem /= l.states;
            }
            let joined: Vec<String> = prefix.iter().map(usize::to_string).collect();
            for sigma in &self.alphabet {
                names.push(format!("{sigma}|{}", joined.join(",")));
            }
        }
        Semiautomaton {
            alphabet: names,
            delta: level.delta.clone(),
        }
    }
}
