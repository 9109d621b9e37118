use std::collections::BTreeMap;

use super::{Automaton, Semiautomaton};

impl Automaton {
    /// Canonical form: reachable part quotiented by Moore partition
    /// refinement on output labels, renumbered breadth-first.
    pub fn minimize(&self) -> Automaton {
        let a = self.reachable();
        let n = a.num_states();
        let k = a.semi.num_letters();

        // Initial partition by output letter.
        let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
        let mut class: Vec<usize> = a
            .outputs
            .iter()
            .map(|o| {
                let next = labels.len();
                *labels.entry(o.as_str()).or_insert(next)
            })
            .collect();
        let mut count = labels.len();

        loop {
            let mut signatures: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|q| {
                    let mut sig = Vec::with_capacity(k + 1);
                    sig.push(class[q]);
                    sig.extend(a.semi.delta[q].iter().map(|&t| class[t]));
                    let next = signatures.len();
                    *signatures.entry(sig).or_insert(next)
                })
                .collect();
            let refined_count = signatures.len();
            class = refined;
            if refined_count == count {
                break;
            }
            count = refined_count;
        }

        let mut delta = vec![Vec::new(); count];
        let mut outputs = vec![String::new(); count];
        for q in 0..n {
            let c = class[q];
            if delta[c].is_empty() {
                delta[c] = a.semi.delta[q].iter().map(|&t| class[t]).collect();
                outputs[c] = a.outputs[q].clone();
            }
        }
        Automaton {
            semi: Semiautomaton {
                alphabet: a.semi.alphabet.clone(),
                delta,
            },
            initial: class[a.initial],
            outputs,
        }
        .reachable()
    }
}
