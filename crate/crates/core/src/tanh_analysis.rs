//! Scalar analysis of a single recurrent tanh unit.
//!
//! For a unit with recurrent weight `w` and a constant input offset `v` the
//! dynamics are `h_v(x) = tanh(w·x + v)`. Fixpoints of `h_v` are the zeros of
//! `g_v(x) = x − h_v(x)`. When `w > 1` the curve `g_v` has two stationary
//! points and, for exactly two offsets `v_+ < v_-`, it touches the axis at one
//! of them. The touching points are the *pivots* `p_− < p_+`; every fixpoint of
//! every offset sits at a fixed position relative to them, which is what makes
//! the three-digit classification in [`kappa`] stable.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default step criterion used when settling.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget when settling.
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

const BISECTION_DEPTH: usize = 200;
const NEWTON_STEPS: usize = 20;
const RESIDUAL_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("weight {w} is in the contractive regime (w <= 1); pivots are undefined")]
    ContractiveRegime { w: f64 },
    #[error("weight must be a finite positive number, got {w}")]
    InvalidWeight { w: f64 },
    #[error("fixpoint iteration did not converge after {iterations} steps (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
}

/// `h_v(x) = tanh(w·x + v)`.
#[inline]
pub fn h(w: f64, v: f64, x: f64) -> f64 {
    (w * x + v).tanh()
}

/// `g_v(x) = x − tanh(w·x + v)`.
#[inline]
pub fn g(w: f64, v: f64, x: f64) -> f64 {
    x - h(w, v, x)
}

/// `g_v'(x) = 1 − w·sech²(w·x + v)`.
#[inline]
pub fn g_prime(w: f64, v: f64, x: f64) -> f64 {
    let c = (w * x + v).cosh();
    1.0 - w / (c * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `w ≤ 1`: a single fixpoint for every offset.
    Contractive,
    /// `w > 1`: one, two or three fixpoints depending on the offset.
    Bistable,
}

/// A positive recurrent weight together with its dynamical regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronShape {
    w: f64,
    regime: Regime,
}

impl NeuronShape {
    pub fn new(w: f64) -> Result<Self, AnalysisError> {
        if !(w.is_finite() && w > 0.0) {
            return Err(AnalysisError::InvalidWeight { w });
        }
        let regime = if w > 1.0 {
            Regime::Bistable
        } else {
            Regime::Contractive
        };
        Ok(Self { w, regime })
    }

    pub fn weight(&self) -> f64 {
        self.w
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Pivots, or `None` in the contractive regime.
    pub fn pivots(&self) -> Option<PivotPair> {
        pivots(self.w).ok()
    }
}

/// The tangency points of `g_{v_-}` (local maximum) and `g_{v_+}` (local
/// minimum) with the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PivotPair {
    pub p_minus: f64,
    pub p_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
}

/// Closed-form pivots for `w > 1`:
/// `p_± = ±sqrt(1 − 1/w)` and `v_± = ±(artanh(p_+) − w·p_+)`.
pub fn pivots(w: f64) -> Result<PivotPair, AnalysisError> {
    NeuronShape::new(w)?;
    if w <= 1.0 {
        return Err(AnalysisError::ContractiveRegime { w });
    }
    let p_plus = (1.0 - 1.0 / w).sqrt();
    let v_plus = p_plus.atanh() - w * p_plus;
    Ok(PivotPair {
        p_minus: -p_plus,
        p_plus,
        v_minus: -v_plus,
        v_plus,
    })
}

/// The local maximum `p_-^v` and local minimum `p_+^v` of `g_v`, i.e. the two
/// zeros of `g_v'` when `w > 1`.
pub fn stationary_points(w: f64, v: f64) -> Result<(f64, f64), AnalysisError> {
    NeuronShape::new(w)?;
    if w <= 1.0 {
        return Err(AnalysisError::ContractiveRegime { w });
    }
    let s = w.sqrt().acosh();
    Ok(((-s - v) / w, (s - v) / w))
}

/// Position of a value relative to the pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Digit {
    One,
    Two,
    Three,
}

impl Digit {
    pub const ALL: [Digit; 3] = [Digit::One, Digit::Two, Digit::Three];

    pub fn value(self) -> u8 {
        match self {
            Digit::One => 1,
            Digit::Two => 2,
            Digit::Three => 3,
        }
    }

    /// Zero-based index, used as the state index of a cascade level.
    pub fn index(self) -> usize {
        self.value() as usize - 1
    }

    pub fn from_index(i: usize) -> Option<Digit> {
        Digit::ALL.get(i).copied()
    }
}

impl From<Digit> for u8 {
    fn from(d: Digit) -> u8 {
        d.value()
    }
}

impl TryFrom<u8> for Digit {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Digit::One),
            2 => Ok(Digit::Two),
            3 => Ok(Digit::Three),
            other => Err(format!("digit must be 1, 2 or 3, got {other}")),
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// κ with closed boundaries at both pivots: `x ≤ p_−` is 1, `p_+ ≤ x` is 3.
pub fn kappa(x: f64, pivots: &PivotPair) -> Digit {
    if x <= pivots.p_minus {
        Digit::One
    } else if x < pivots.p_plus {
        Digit::Two
    } else {
        Digit::Three
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Digit(Digit),
    /// Within `margin` of a pivot.
    Ambiguous,
}

impl Classification {
    pub fn digit(self) -> Option<Digit> {
        match self {
            Classification::Digit(d) => Some(d),
            Classification::Ambiguous => None,
        }
    }
}

/// κ guarded by a tie margin: values closer than `margin` to either pivot are
/// reported as [`Classification::Ambiguous`].
pub fn classify(x: f64, pivots: &PivotPair, margin: f64) -> Classification {
    if (x - pivots.p_minus).abs() < margin || (x - pivots.p_plus).abs() < margin {
        Classification::Ambiguous
    } else {
        Classification::Digit(kappa(x, pivots))
    }
}

/// Fixpoints of `h_v`, sorted increasingly, with their κ digit. In the
/// contractive regime the digit is always [`Digit::Two`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixpointSet {
    pub points: Vec<f64>,
    pub digits: Vec<Digit>,
}

impl FixpointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn least(&self) -> f64 {
        self.points[0]
    }

    pub fn greatest(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

fn bisect(w: f64, v: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(w, v, lo);
    for _ in 0..BISECTION_DEPTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(w, v, mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (g(w, v, lo).abs(), g(w, v, hi).abs());
    if glo <= ghi {
        lo
    } else {
        hi
    }
}

/// Newton on `g_v`, accepting a step only when it lowers the residual.
fn newton_polish(w: f64, v: f64, mut x: f64) -> f64 {
    let mut r = g(w, v, x).abs();
    for _ in 0..NEWTON_STEPS {
        if r <= RESIDUAL_TARGET * 1e-3 {
            break;
        }
        let d = g_prime(w, v, x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - g(w, v, x) / d;
        if !(-1.0..=1.0).contains(&next) {
            break;
        }
        let r_next = g(w, v, next).abs();
        if r_next >= r {
            break;
        }
        x = next;
        r = r_next;
    }
    x
}

/// All zeros of `g_v` in `[−1, 1]`.
///
/// The interval is split at the stationary points (when `w > 1`) into at most
/// three monotone pieces; each piece with a sign change is bisected and the
/// root polished by Newton. A stationary point where `|g_v| ≤ tol` is a
/// tangency and is reported as a (double) root.
pub fn fixpoints(w: f64, v: f64, tol: f64) -> FixpointSet {
    let mut breaks = vec![-1.0];
    let mut tangents = Vec::new();
    if w > 1.0 {
        let (a, b) = stationary_points(w, v).expect("w > 1");
        for s in [a, b] {
            if s > -1.0 && s < 1.0 {
                breaks.push(s);
                if g(w, v, s).abs() <= tol {
                    tangents.push(s);
                }
            }
        }
    }
    breaks.push(1.0);

    let mut roots = tangents;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ga, gb) = (g(w, v, a), g(w, v, b));
        if (ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0) {
            roots.push(newton_polish(w, v, bisect(w, v, a, b)));
        }
    }
    roots.sort_by(f64::total_cmp);

    // Roots either side of a near-tangency collapse onto one point.
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if g(w, v, 0.5 * (*last + r)).abs() <= tol => {
                if g(w, v, r).abs() < g(w, v, *last).abs() {
                    *last = r;
                }
            }
            _ => merged.push(r),
        }
    }

    let digits = match pivots(w) {
        Ok(p) => merged.iter().map(|&x| kappa(x, &p)).collect(),
        Err(_) => vec![Digit::Two; merged.len()],
    };
    FixpointSet {
        points: merged,
        digits,
    }
}

/// Iterates `x ← tanh(w·x + v)` from `x0` until a step is at most `tol`, then
/// polishes with Newton. Returns the limit and the number of steps taken.
pub fn settle_scalar_counted(
    w: f64,
    v: f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, usize), AnalysisError> {
    let mut x = x0;
    let mut step = f64::INFINITY;
    for k in 1..=max_iter {
        let next = h(w, v, x);
        step = (next - x).abs();
        x = next;
        if step <= tol {
            return Ok((newton_polish(w, v, x), k));
        }
    }
    Err(AnalysisError::NoConvergence {
        iterations: max_iter,
        last_step: step,
    })
}

/// Limit of the constant-input iteration started at `x0`.
pub fn settle_scalar(w: f64, v: f64, x0: f64, tol: f64, max_iter: usize) -> Result<f64, AnalysisError> {
    settle_scalar_counted(w, v, x0, tol, max_iter).map(|(x, _)| x)
}
