//! Recurrent tanh cascades under grounded symbolic input.
//!
//! Neuron `i` (zero-based here, one-based in diagnostics) updates as
//! `x_i ← tanh(w_i·x_i + β_i(u, x_1, …, x_{i−1}))`, reading only the previous
//! values of the neurons before it. Letters are grounded by one representative
//! input vector each; outputs are grounded by disjoint threshold bands.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tanh_analysis::{self, AnalysisError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("output value {0} falls in no output band")]
    UngroundedOutput(f64),
    #[error("the alphabet has no identity letter")]
    NoIdentityLetter,
    #[error("neuron {neuron} did not settle within {iterations} iterations")]
    NoConvergence { neuron: usize, iterations: usize },
    #[error("invalid network: {0}")]
    InvalidNet(String),
}

/// One dense layer, `y = W·x + b` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Layer {
    fn inputs(&self) -> usize {
        self.w.first().map_or(0, Vec::len)
    }

    fn outputs(&self) -> usize {
        self.b.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.b)
            .map(|(row, b)| dot(row, x) + b)
            .collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A scalar-valued feedforward function. `Layered` applies tanh after every
/// layer except the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InputFunctionRepr", into = "InputFunctionRepr")]
pub enum InputFunction {
    Affine(Layer),
    Layered(Vec<Layer>),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FunctionKind {
    Affine,
    Layered,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFunctionRepr {
    kind: FunctionKind,
    layers: Vec<Layer>,
}

impl TryFrom<InputFunctionRepr> for InputFunction {
    type Error = DynamicsError;

    fn try_from(r: InputFunctionRepr) -> Result<Self, Self::Error> {
        let f = match r.kind {
            FunctionKind::Affine => {
                let [layer]: [Layer; 1] = r.layers.try_into().map_err(|_| {
                    DynamicsError::InvalidNet("an affine function has exactly one layer".into())
                })?;
                InputFunction::Affine(layer)
            }
            FunctionKind::Layered => InputFunction::Layered(r.layers),
        };
        f.check_shapes()?;
        Ok(f)
    }
}

impl From<InputFunction> for InputFunctionRepr {
    fn from(f: InputFunction) -> Self {
        match f {
            InputFunction::Affine(l) => InputFunctionRepr {
                kind: FunctionKind::Affine,
                layers: vec![l],
            },
            InputFunction::Layered(ls) => InputFunctionRepr {
                kind: FunctionKind::Layered,
                layers: ls,
            },
        }
    }
}

impl InputFunction {
    /// `x ↦ weights·x + bias`.
    pub fn affine(weights: Vec<f64>, bias: f64) -> Self {
        InputFunction::Affine(Layer {
            w: vec![weights],
            b: vec![bias],
        })
    }

    fn layers(&self) -> &[Layer] {
        match self {
            InputFunction::Affine(l) => std::slice::from_ref(l),
            InputFunction::Layered(ls) => ls,
        }
    }

    fn check_shapes(&self) -> Result<(), DynamicsError> {
        let layers = self.layers();
        if layers.is_empty() {
            return Err(DynamicsError::InvalidNet("function without layers".into()));
        }
        let mut width = layers[0].inputs();
        for (k, layer) in layers.iter().enumerate() {
            if layer.w.len() != layer.b.len() {
                return Err(DynamicsError::InvalidNet(format!(
                    "layer {k}: {} weight rows but {} biases",
                    layer.w.len(),
                    layer.b.len()
                )));
            }
            if layer.w.iter().any(|row| row.len() != width) {
                return Err(DynamicsError::InvalidNet(format!(
                    "layer {k}: expected rows of length {width}"
                )));
            }
            if layer.w.iter().flatten().chain(&layer.b).any(|x| !x.is_finite()) {
                return Err(DynamicsError::InvalidNet(format!("layer {k}: non-finite parameter")));
            }
            width = layer.outputs();
        }
        if width != 1 {
            return Err(DynamicsError::InvalidNet(format!(
                "function must be scalar-valued, final layer has {width} outputs"
            )));
        }
        Ok(())
    }

    /// Number of inputs the function reads.
    pub fn arity(&self) -> usize {
        self.layers()[0].inputs()
    }

    pub fn eval(&self, input: &[f64]) -> f64 {
        match self {
            InputFunction::Affine(l) => dot(&l.w[0], input) + l.b[0],
            InputFunction::Layered(ls) => {
                let last = ls.len() - 1;
                let mut x = input.to_vec();
                for (k, layer) in ls.iter().enumerate() {
                    x = layer.apply(&x);
                    if k != last {
                        x.iter_mut().for_each(|v| *v = v.tanh());
                    }
                }
                x[0]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronSpec {
    pub weight: f64,
    pub beta: InputFunction,
}

/// A cascade of recurrent tanh neurons with a scalar output function.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeNet {
    input_dim: usize,
    neurons: Vec<NeuronSpec>,
    initial_state: Vec<f64>,
    output: InputFunction,
}

impl CascadeNet {
    pub fn new(
        input_dim: usize,
        neurons: Vec<NeuronSpec>,
        initial_state: Vec<f64>,
        output: InputFunction,
    ) -> Result<Self, DynamicsError> {
        if initial_state.len() != neurons.len() {
            return Err(DynamicsError::DimensionMismatch {
                what: "initial state",
                expected: neurons.len(),
                got: initial_state.len(),
            });
        }
        if initial_state.iter().any(|x| !(-1.0..=1.0).contains(x)) {
            return Err(DynamicsError::InvalidNet("initial state outside [-1, 1]".into()));
        }
        for (i, neuron) in neurons.iter().enumerate() {
            if !neuron.weight.is_finite() {
                return Err(DynamicsError::InvalidNet(format!("neuron {}: non-finite weight", i + 1)));
            }
            if neuron.beta.arity() != input_dim + i {
                return Err(DynamicsError::DimensionMismatch {
                    what: "input function arity",
                    expected: input_dim + i,
                    got: neuron.beta.arity(),
                });
            }
        }
        if output.arity() != neurons.len() {
            return Err(DynamicsError::DimensionMismatch {
                what: "output function arity",
                expected: neurons.len(),
                got: output.arity(),
            });
        }
        Ok(Self {
            input_dim,
            neurons,
            initial_state,
            output,
        })
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn neurons(&self) -> &[NeuronSpec] {
        &self.neurons
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial_state
    }

    pub fn output_fn(&self) -> &InputFunction {
        &self.output
    }

    fn check_state(&self, x: &[f64]) -> Result<(), DynamicsError> {
        if x.len() != self.len() {
            return Err(DynamicsError::DimensionMismatch {
                what: "state",
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_input(&self, u: &[f64]) -> Result<(), DynamicsError> {
        if u.len() != self.input_dim {
            return Err(DynamicsError::DimensionMismatch {
                what: "input",
                expected: self.input_dim,
                got: u.len(),
            });
        }
        Ok(())
    }

    /// One synchronous update. Every neuron reads the old values of the
    /// neurons before it.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        self.check_state(x)?;
        self.check_input(u)?;
        let mut buf = Vec::with_capacity(self.input_dim + self.len());
        let mut out = vec![0.0; self.len()];
        self.step_into(x, u, &mut buf, &mut out);
        Ok(out)
    }

    /// Unchecked step writing into `out`; `buf` is scratch space.
    pub(crate) fn step_into(&self, x: &[f64], u: &[f64], buf: &mut Vec<f64>, out: &mut [f64]) {
        buf.clear();
        buf.extend_from_slice(u);
        buf.extend_from_slice(x);
        for (i, neuron) in self.neurons.iter().enumerate() {
            let v = neuron.beta.eval(&buf[..self.input_dim + i]);
            out[i] = (neuron.weight * x[i] + v).tanh();
        }
    }

    /// Raw output value `h(x)`.
    pub fn output_value(&self, x: &[f64]) -> f64 {
        self.output.eval(x)
    }
}

/// A neuron whose recurrent weight is not strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RncpViolation {
    /// One-based neuron position.
    pub neuron: usize,
    pub weight: f64,
}

/// Checks that every recurrent weight is strictly positive.
pub fn validate_rncp(net: &CascadeNet) -> Result<(), Vec<RncpViolation>> {
    let violations: Vec<_> = net
        .neurons
        .iter()
        .enumerate()
        .filter(|(_, n)| n.weight <= 0.0)
        .map(|(i, n)| RncpViolation {
            neuron: i + 1,
            weight: n.weight,
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Output value band `[lo, hi)` grounded to an output letter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, String)", into = "(f64, f64, String)")]
pub struct OutputBand {
    pub lo: f64,
    pub hi: f64,
    pub letter: String,
}

impl OutputBand {
    pub fn new(lo: f64, hi: f64, letter: impl Into<String>) -> Self {
        Self {
            lo,
            hi,
            letter: letter.into(),
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y < self.hi
    }
}

impl From<(f64, f64, String)> for OutputBand {
    fn from((lo, hi, letter): (f64, f64, String)) -> Self {
        Self { lo, hi, letter }
    }
}

impl From<OutputBand> for (f64, f64, String) {
    fn from(b: OutputBand) -> Self {
        (b.lo, b.hi, b.letter)
    }
}

/// Input letters with one representative vector each, an optional identity
/// letter, and the output grounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundedAlphabet {
    pub letters: Vec<String>,
    pub reps: BTreeMap<String, Vec<f64>>,
    pub identity: Option<String>,
    pub output_bands: Vec<OutputBand>,
}

impl GroundedAlphabet {
    pub fn validate(&self, input_dim: usize) -> Result<(), DynamicsError> {
        let unique: BTreeSet<_> = self.letters.iter().collect();
        if unique.len() != self.letters.len() {
            return Err(DynamicsError::InvalidNet("duplicate letters".into()));
        }
        if self.letters.is_empty() {
            return Err(DynamicsError::InvalidNet("empty alphabet".into()));
        }
        for letter in &self.letters {
            let rep = self
                .reps
                .get(letter)
                .ok_or_else(|| DynamicsError::InvalidNet(format!("letter {letter:?} has no representative")))?;
            if rep.len() != input_dim {
                return Err(DynamicsError::DimensionMismatch {
                    what: "letter representative",
                    expected: input_dim,
                    got: rep.len(),
                });
            }
        }
        if let Some(extra) = self.reps.keys().find(|k| !unique.contains(k)) {
            return Err(DynamicsError::InvalidNet(format!("representative for undeclared letter {extra:?}")));
        }
        if let Some(e) = &self.identity {
            if !unique.contains(e) {
                return Err(DynamicsError::UnknownLetter(e.clone()));
            }
        }
        if self.output_bands.is_empty() {
            return Err(DynamicsError::InvalidNet("no output bands".into()));
        }
        let mut bands: Vec<&OutputBand> = self.output_bands.iter().collect();
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for b in &bands {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                return Err(DynamicsError::InvalidNet(format!(
                    "output band [{}, {}) is empty or non-finite",
                    b.lo, b.hi
                )));
            }
        }
        if bands.windows(2).any(|p| p[0].hi > p[1].lo) {
            return Err(DynamicsError::InvalidNet("output bands overlap".into()));
        }
        Ok(())
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == letter)
    }

    pub fn rep(&self, letter: &str) -> Result<&[f64], DynamicsError> {
        self.reps
            .get(letter)
            .map(Vec::as_slice)
            .ok_or_else(|| DynamicsError::UnknownLetter(letter.to_string()))
    }

    pub fn identity_rep(&self) -> Result<&[f64], DynamicsError> {
        let e = self.identity.as_deref().ok_or(DynamicsError::NoIdentityLetter)?;
        self.rep(e)
    }

    /// Distinct output letters in band order.
    pub fn output_alphabet(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.output_bands
            .iter()
            .filter(|b| seen.insert(b.letter.clone()))
            .map(|b| b.letter.clone())
            .collect()
    }

    pub fn ground_output(&self, y: f64) -> Result<&str, DynamicsError> {
        self.output_bands
            .iter()
            .find(|b| b.contains(y))
            .map(|b| b.letter.as_str())
            .ok_or(DynamicsError::UngroundedOutput(y))
    }

    /// Resolves a word to letter indices.
    pub fn parse_word<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>, DynamicsError> {
        word.iter()
            .map(|l| {
                self.letter_index(l.as_ref())
                    .ok_or_else(|| DynamicsError::UnknownLetter(l.as_ref().to_string()))
            })
            .collect()
    }
}

/// A network together with its grounding; the unit stored in network files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroundedNetRepr", into = "GroundedNetRepr")]
pub struct GroundedNet {
    pub net: CascadeNet,
    pub alphabet: GroundedAlphabet,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundedNetRepr {
    input_dim: usize,
    neurons: Vec<NeuronSpec>,
    initial_state: Vec<f64>,
    output: InputFunction,
    alphabet: GroundedAlphabet,
}

impl TryFrom<GroundedNetRepr> for GroundedNet {
    type Error = DynamicsError;

    fn try_from(r: GroundedNetRepr) -> Result<Self, Self::Error> {
        let net = CascadeNet::new(r.input_dim, r.neurons, r.initial_state, r.output)?;
        GroundedNet::new(net, r.alphabet)
    }
}

impl From<GroundedNet> for GroundedNetRepr {
    fn from(g: GroundedNet) -> Self {
        GroundedNetRepr {
            input_dim: g.net.input_dim,
            neurons: g.net.neurons,
            initial_state: g.net.initial_state,
            output: g.net.output,
            alphabet: g.alphabet,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    /// States visited, starting with the initial state.
    pub trajectory: Vec<Vec<f64>>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settled {
    pub limit: Vec<f64>,
    pub steps: usize,
}

impl GroundedNet {
    pub fn new(net: CascadeNet, alphabet: GroundedAlphabet) -> Result<Self, DynamicsError> {
        alphabet.validate(net.input_dim)?;
        Ok(Self { net, alphabet })
    }

    /// Grounded output letter of a state.
    pub fn output_letter(&self, x: &[f64]) -> Result<&str, DynamicsError> {
        self.alphabet.ground_output(self.net.output_value(x))
    }

    pub fn step_letter(&self, x: &[f64], letter: &str) -> Result<Vec<f64>, DynamicsError> {
        self.net.step(x, self.alphabet.rep(letter)?)
    }

    /// Folds the word over the representatives from the initial state.
    pub fn run<S: AsRef<str>>(&self, word: &[S]) -> Result<RunOutcome, DynamicsError> {
        let mut trajectory = vec![self.net.initial_state.clone()];
        for letter in word {
            let next = self.step_letter(trajectory.last().unwrap(), letter.as_ref())?;
            trajectory.push(next);
        }
        let output = self.output_letter(trajectory.last().unwrap())?.to_string();
        Ok(RunOutcome { trajectory, output })
    }

    /// Limit of the state sequence under the repeated identity letter.
    ///
    /// Neurons are settled one after the other. Neuron `i` is iterated
    /// against the recorded trajectory of its prefix until the prefix has
    /// reached its limit and its own step falls to `tol`; the value is then
    /// polished against the constant offset `β_i(u_e, settled prefix)`.
    pub fn settle(&self, x: &[f64], tol: f64, max_iter: usize) -> Result<Settled, DynamicsError> {
        self.net.check_state(x)?;
        let u_e = self.alphabet.identity_rep()?;
        let d = self.net.input_dim;
        let n = self.net.len();

        let mut trajectories: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut settled_at: Vec<usize> = Vec::with_capacity(n);
        let mut limits: Vec<f64> = Vec::with_capacity(n);
        let mut buf: Vec<f64> = u_e.iter().copied().chain(std::iter::repeat_n(0.0, n)).collect();
        let mut steps = 0;

        for (i, neuron) in self.net.neurons.iter().enumerate() {
            let prefix_ready = settled_at.iter().copied().max().unwrap_or(0);
            let mut xi = x[i];
            let mut traj = vec![xi];
            let mut t = 0usize;
            loop {
                for (j, tr) in trajectories.iter().enumerate() {
                    buf[d + j] = tr[t.min(tr.len() - 1)];
                }
                let next = (neuron.weight * xi + neuron.beta.eval(&buf[..d + i])).tanh();
                t += 1;
                let step = (next - xi).abs();
                xi = next;
                traj.push(xi);
                if t > prefix_ready && step <= tol {
                    break;
                }
                if t >= prefix_ready.saturating_add(max_iter) {
                    return Err(DynamicsError::NoConvergence {
                        neuron: i + 1,
                        iterations: max_iter,
                    });
                }
            }

            buf[d..d + i].copy_from_slice(&limits);
            let v = neuron.beta.eval(&buf[..d + i]);
            let limit = tanh_analysis::settle_scalar(neuron.weight, v, xi, tol, max_iter).map_err(
                |e| match e {
                    AnalysisError::NoConvergence { iterations, .. } => DynamicsError::NoConvergence {
                        neuron: i + 1,
                        iterations,
                    },
                    other => DynamicsError::InvalidNet(other.to_string()),
                },
            )?;
            *traj.last_mut().unwrap() = limit;
            let first_close = traj.iter().position(|&y| (y - limit).abs() <= tol).unwrap();
            steps = steps.max(t);
            settled_at.push(first_close);
            trajectories.push(traj);
            limits.push(limit);
        }
        Ok(Settled { limit: limits, steps })
    }
}
