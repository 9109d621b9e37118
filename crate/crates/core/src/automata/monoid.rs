use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Automaton, AutomatonError, Semiautomaton};

/// Default bound on the number of monoid elements enumerated.
pub const DEFAULT_MONOID_CAP: usize = 1_000_000;

/// A total map on states, `self.0[q]` is the image of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transformation(pub Vec<usize>);

impl Transformation {
    pub fn identity(n: usize) -> Self {
        Transformation((0..n).collect())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Transformation) -> Transformation {
        Transformation(self.0.iter().map(|&q| next.0[q]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(q, &t)| q == t)
    }

    pub fn is_idempotent(&self) -> bool {
        self.then(self) == *self
    }

    /// Smallest `k ≥ 1` with `m^k = m^{k+1}`, if any exists below `bound`.
    pub fn aperiodic_index(&self, bound: usize) -> Option<usize> {
        let mut power = self.clone();
        for k in 1..=bound.max(1) {
            let next = power.then(self);
            if next == power {
                return Some(k);
            }
            power = next;
        }
        None
    }

    /// Length of the cycle the powers `m, m², …` eventually enter.
    pub fn period(&self) -> usize {
        let mut seen: HashMap<Transformation, usize> = HashMap::new();
        let mut power = self.clone();
        let mut k = 1;
        loop {
            if let Some(&first) = seen.get(&power) {
                return k - first;
            }
            seen.insert(power.clone(), k);
            power = power.then(self);
            k += 1;
        }
    }
}

/// The transformations induced by all words, each with a shortest word
/// producing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMonoid {
    pub elements: Vec<Transformation>,
    /// `words[i]` is a shortest word (letter indices) inducing `elements[i]`.
    pub words: Vec<Vec<usize>>,
    pub generators: Vec<Transformation>,
}

impl TransitionMonoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: &Transformation) -> bool {
        self.elements.contains(t)
    }
}

impl Semiautomaton {
    /// Closure of the letter transformations under composition, starting
    /// from the identity. Breadth-first, so each element carries a shortest
    /// word.
    pub fn transition_monoid(&self, cap: usize) -> Result<TransitionMonoid, AutomatonError> {
        let generators: Vec<Transformation> =
            (0..self.num_letters()).map(|a| self.transformation(a)).collect();
        let identity = Transformation::identity(self.num_states());
        let mut index: HashMap<Transformation, usize> = HashMap::from([(identity.clone(), 0)]);
        let mut elements = vec![identity];
        let mut words = vec![vec![]];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (a, gen) in generators.iter().enumerate() {
                let t = elements[i].then(gen);
                if index.contains_key(&t) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(AutomatonError::CapExceeded { cap });
                }
                let mut w = words[i].clone();
                w.push(a);
                index.insert(t.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(t);
                words.push(w);
            }
        }
        Ok(TransitionMonoid {
            elements,
            words,
            generators,
        })
    }
}

/// A monoid element with a nontrivial cycle among its powers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AperiodicityWitness {
    pub word: Vec<String>,
    pub transformation: Transformation,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AperiodicityReport {
    pub aperiodic: bool,
    pub minimal_states: usize,
    pub monoid_size: usize,
    pub witness: Option<AperiodicityWitness>,
}

impl Automaton {
    /// Decides aperiodicity on the transition monoid of the minimal
    /// automaton: every element must satisfy `m^k = m^{k+1}` for some
    /// `k ≤ |Q|`.
    pub fn aperiodicity(&self, cap: usize) -> Result<AperiodicityReport, AutomatonError> {
        let m = self.minimize();
        let n = m.num_states();
        let monoid = m.semiautomaton().transition_monoid(cap)?;
        let witness = monoid
            .elements
            .iter()
            .zip(&monoid.words)
            .find(|(t, _)| t.aperiodic_index(n).is_none())
            .map(|(t, w)| AperiodicityWitness {
                word: w.iter().map(|&a| m.alphabet()[a].clone()).collect(),
                transformation: t.clone(),
                period: t.period(),
            });
        Ok(AperiodicityReport {
            aperiodic: witness.is_none(),
            minimal_states: n,
            monoid_size: monoid.len(),
            witness,
        })
    }

    pub fn is_aperiodic(&self, cap: usize) -> Result<bool, AutomatonError> {
        Ok(self.aperiodicity(cap)?.aperiodic)
    }
}
