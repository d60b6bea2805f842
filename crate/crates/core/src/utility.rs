//! Utility functions over weighted texts.
//!
//! A local utility aggregates the weights of one fragment; a global utility aggregates the
//! local utilities of every occurrence of a pattern. Local aggregators are restricted to ones
//! that can be answered from prefix sums, so any fragment costs O(1) once the prefix array is
//! built.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UsiError};
use crate::text::WeightedText;

/// How the weights of one fragment are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalOp {
    #[default]
    Sum,
    /// Sum divided by the fragment length.
    Mean,
}

/// How the local utilities of all occurrences are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalOp {
    #[default]
    Sum,
    Min,
    Max,
    Avg,
}

impl LocalOp {
    pub fn tag(self) -> u64 {
        match self {
            LocalOp::Sum => 0,
            LocalOp::Mean => 1,
        }
    }

    pub fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(LocalOp::Sum),
            1 => Some(LocalOp::Mean),
            _ => None,
        }
    }
}

impl GlobalOp {
    pub fn tag(self) -> u64 {
        match self {
            GlobalOp::Sum => 0,
            GlobalOp::Min => 1,
            GlobalOp::Max => 2,
            GlobalOp::Avg => 3,
        }
    }

    pub fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(GlobalOp::Sum),
            1 => Some(GlobalOp::Min),
            2 => Some(GlobalOp::Max),
            3 => Some(GlobalOp::Avg),
            _ => None,
        }
    }

    fn seed(self) -> f64 {
        match self {
            GlobalOp::Sum | GlobalOp::Avg => 0.0,
            GlobalOp::Min => f64::INFINITY,
            GlobalOp::Max => f64::NEG_INFINITY,
        }
    }

    fn fold(self, acc: f64, x: f64) -> f64 {
        match self {
            GlobalOp::Sum | GlobalOp::Avg => acc + x,
            GlobalOp::Min => acc.min(x),
            GlobalOp::Max => acc.max(x),
        }
    }
}

impl FromStr for LocalOp {
    type Err = UsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(LocalOp::Sum),
            "mean" => Ok(LocalOp::Mean),
            other => Err(UsiError::InvalidParameter(format!("unknown local op '{other}'"))),
        }
    }
}

impl FromStr for GlobalOp {
    type Err = UsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(GlobalOp::Sum),
            "min" => Ok(GlobalOp::Min),
            "max" => Ok(GlobalOp::Max),
            "avg" => Ok(GlobalOp::Avg),
            other => Err(UsiError::InvalidParameter(format!("unknown global op '{other}'"))),
        }
    }
}

impl fmt::Display for GlobalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GlobalOp::Sum => "sum",
            GlobalOp::Min => "min",
            GlobalOp::Max => "max",
            GlobalOp::Avg => "avg",
        })
    }
}

/// A global utility function: local aggregator plus global aggregator.
///
/// Patterns without occurrences evaluate to `Some(0.0)` under `sum` and `avg` and to `None`
/// under `min` and `max`, where the empty aggregate is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UtilitySpec {
    pub local_op: LocalOp,
    pub global_op: GlobalOp,
}

impl UtilitySpec {
    /// Sum of the local sums over all occurrences.
    pub const SUM_OF_SUMS: UtilitySpec = UtilitySpec { local_op: LocalOp::Sum, global_op: GlobalOp::Sum };

    pub fn new(local_op: LocalOp, global_op: GlobalOp) -> Self {
        UtilitySpec { local_op, global_op }
    }

    pub fn empty_result(&self) -> Option<f64> {
        match self.global_op {
            GlobalOp::Sum | GlobalOp::Avg => Some(0.0),
            GlobalOp::Min | GlobalOp::Max => None,
        }
    }

    pub fn aggregate(&self) -> Aggregate {
        Aggregate { count: 0, acc: self.global_op.seed() }
    }
}

/// Running global aggregate over a stream of local utilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub count: u64,
    pub acc: f64,
}

impl Aggregate {
    #[inline]
    pub fn push(&mut self, op: GlobalOp, local: f64) {
        self.count += 1;
        self.acc = op.fold(self.acc, local);
    }

    pub fn finish(&self, spec: &UtilitySpec) -> Option<f64> {
        if self.count == 0 {
            return spec.empty_result();
        }
        match spec.global_op {
            GlobalOp::Avg => Some(self.acc / self.count as f64),
            _ => Some(self.acc),
        }
    }
}

/// `psw[i]` is the local aggregate of `weights[0..=i]`; `psw[-1]` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixUtilityArray {
    psw: Vec<f64>,
    local_op: LocalOp,
}

impl PrefixUtilityArray {
    pub fn build(wt: &WeightedText, spec: &UtilitySpec) -> Self {
        Self::from_weights(wt.weights(), spec.local_op)
    }

    pub fn from_weights(weights: &[f64], local_op: LocalOp) -> Self {
        let mut running = 0.0;
        let psw = weights
            .iter()
            .map(|w| {
                running += w;
                running
            })
            .collect();
        PrefixUtilityArray { psw, local_op }
    }

    pub fn from_raw(psw: Vec<f64>, local_op: LocalOp) -> Self {
        PrefixUtilityArray { psw, local_op }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psw
    }

    pub fn local_op(&self) -> LocalOp {
        self.local_op
    }

    pub fn len(&self) -> usize {
        self.psw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psw.is_empty()
    }

    pub fn size_bytes(&self) -> usize {
        self.psw.len() * std::mem::size_of::<f64>()
    }

    /// Local utility of the fragment starting at `start` with length `len`.
    pub fn local_utility(&self, start: usize, len: usize) -> Result<f64> {
        let n = self.psw.len();
        if len == 0 || start.checked_add(len).is_none_or(|end| end > n) {
            return Err(UsiError::FragmentOutOfRange { start, len, n });
        }
        Ok(self.local_utility_unchecked(start, len))
    }

    /// Same as [`local_utility`](Self::local_utility) without the range check.
    #[inline]
    pub fn local_utility_unchecked(&self, start: usize, len: usize) -> f64 {
        let end = self.psw[start + len - 1];
        let sum = if start == 0 { end } else { end - self.psw[start - 1] };
        match self.local_op {
            LocalOp::Sum => sum,
            LocalOp::Mean => sum / len as f64,
        }
    }
}

/// Reference semantics: scan every position, compare, aggregate directly from the weights.
pub fn global_utility_bruteforce(wt: &WeightedText, spec: &UtilitySpec, pattern: &[u8]) -> Option<f64> {
    let text = wt.text();
    let weights = wt.weights();
    let m = pattern.len();
    let mut agg = spec.aggregate();
    if m == 0 || m > text.len() {
        return agg.finish(spec);
    }
    for i in 0..=text.len() - m {
        if &text[i..i + m] == pattern {
            let sum: f64 = weights[i..i + m].iter().sum();
            let local = match spec.local_op {
                LocalOp::Sum => sum,
                LocalOp::Mean => sum / m as f64,
            };
            agg.push(spec.global_op, local);
        }
    }
    agg.finish(spec)
}

/// Relative comparison used throughout the test suites (`None` only matches `None`).
pub fn utilities_agree(a: Option<f64>, b: Option<f64>, rel_tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            if x == y {
                return true;
            }
            let scale = x.abs().max(y.abs());
            (x - y).abs() <= rel_tol * scale
        }
        _ => false,
    }
}
