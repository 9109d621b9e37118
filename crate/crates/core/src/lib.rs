//! Positive-weight recurrent tanh cascades and the finite automata they
//! implement.
//!
//! [`tanh_analysis`] studies a single neuron `x ↦ tanh(wx + v)`, [`dynamics`]
//! runs whole cascades over grounded letters, [`automata`] holds the finite
//! machinery, and [`extraction`] turns a network into a cascade of
//! three-state semiautomata. [`fixtures`] provides reference automata,
//! hand-built networks and brute-force oracles; [`io`] reads and writes
//! byte-stable JSON.

pub mod automata;
pub mod dynamics;
pub mod extraction;
pub mod fixtures;
pub mod io;
pub mod tanh_analysis;
