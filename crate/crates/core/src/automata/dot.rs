use std::fmt::Write;

use super::Automaton;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with one node per state (`q{i}/{output}`) and one edge
/// per state and letter, in index order.
pub(super) fn automaton_to_dot(a: &Automaton) -> String {
    let mut out = String::new();
    out.push_str("digraph automaton {\n");
    out.push_str("    rankdir=LR;\n");
    out.push_str("    node [shape=circle];\n");
    out.push_str("    __start [shape=point, label=\"\"];\n");
    for q in 0..a.num_states() {
        writeln!(out, "    q{q} [label=\"q{q}/{}\"];", escape(a.output(q))).unwrap();
    }
    writeln!(out, "    __start -> q{};", a.initial()).unwrap();
    for q in 0..a.num_states() {
        for (letter, name) in a.alphabet().iter().enumerate() {
            let t = a.semiautomaton().next(q, letter);
            writeln!(out, "    q{q} -> q{t} [label=\"{}\"];", escape(name)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
