//! Approximate top-K mining over sampled suffixes, one residue class of positions per round.
//!
//! Every reported frequency is a lower bound on the true one: a substring is only credited with
//! occurrences that start at sampled positions of rounds in which it made the per-round list.

use std::cmp::{Ordering, Reverse};

use serde::{Deserialize, Serialize};

use crate::fingerprint::{Fingerprinter, PrefixFingerprints, DEFAULT_SEED};
use crate::par::{self, Execution};
use crate::topk::exact::select_top_k;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LceStrategy {
    /// Letter-by-letter comparison; no extra space.
    #[default]
    DirectCompare,
    /// Binary search on prefix fingerprints; O(n) extra words, O(log n) per query.
    FingerprintBinarySearch,
}

impl std::str::FromStr for LceStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" | "direct-compare" => Ok(LceStrategy::DirectCompare),
            "fingerprint" | "fingerprint-binary-search" => Ok(LceStrategy::FingerprintBinarySearch),
            other => Err(format!("unknown LCE strategy '{other}' (expected direct or fingerprint)")),
        }
    }
}

/// Longest-common-extension queries on a fixed text.
pub struct LceOracle<'t> {
    text: &'t [u8],
    prefix: Option<PrefixFingerprints>,
}

impl<'t> LceOracle<'t> {
    pub fn new(text: &'t [u8], strategy: LceStrategy) -> Self {
        Self::with_seed(text, strategy, DEFAULT_SEED)
    }

    pub fn with_seed(text: &'t [u8], strategy: LceStrategy, seed: u64) -> Self {
        let prefix = match strategy {
            LceStrategy::DirectCompare => None,
            LceStrategy::FingerprintBinarySearch => Some(Fingerprinter::new(seed).prefix_table(text)),
        };
        LceOracle { text, prefix }
    }

    pub fn strategy(&self) -> LceStrategy {
        if self.prefix.is_some() {
            LceStrategy::FingerprintBinarySearch
        } else {
            LceStrategy::DirectCompare
        }
    }

    pub fn text(&self) -> &'t [u8] {
        self.text
    }

    /// Space used beyond the text itself.
    pub fn extra_bytes(&self) -> usize {
        self.prefix.as_ref().map_or(0, PrefixFingerprints::size_bytes)
    }

    pub fn lce(&self, i: usize, j: usize) -> usize {
        let n = self.text.len();
        self.lce_capped(i, j, n - i.max(j))
    }

    /// `min(lce(i, j), cap)`; `cap` must not exceed `n - max(i, j)`.
    pub fn lce_capped(&self, i: usize, j: usize, cap: usize) -> usize {
        if i == j {
            return cap;
        }
        match &self.prefix {
            None => direct_lce(&self.text[i..i + cap], &self.text[j..j + cap]),
            Some(pf) => {
                // Largest l in [0, cap] with equal fingerprints for length l.
                let (mut lo, mut hi) = (0usize, cap);
                while lo < hi {
                    let mid = lo + (hi - lo).div_ceil(2);
                    if pf.fragment(i, mid) == pf.fragment(j, mid) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                lo
            }
        }
    }

    /// Lexicographic order of the suffixes starting at `i` and `j`.
    pub fn compare_suffixes(&self, i: usize, j: usize) -> Ordering {
        let l = self.lce(i, j);
        self.text.get(i + l).cmp(&self.text.get(j + l))
    }

    /// Lexicographic order of `text[a.0 .. a.0 + a.1]` and `text[b.0 .. b.0 + b.1]`.
    pub fn compare_substrings(&self, a: (usize, usize), b: (usize, usize)) -> Ordering {
        let cap = a.1.min(b.1);
        let l = self.lce_capped(a.0, b.0, cap);
        if l < cap {
            self.text[a.0 + l].cmp(&self.text[b.0 + l])
        } else {
            a.1.cmp(&b.1)
        }
    }
}

fn direct_lce(a: &[u8], b: &[u8]) -> usize {
    let mut l = 0;
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in ca.by_ref().zip(cb.by_ref()) {
        let diff = u64::from_le_bytes(x.try_into().unwrap()) ^ u64::from_le_bytes(y.try_into().unwrap());
        if diff != 0 {
            return l + (diff.trailing_zeros() / 8) as usize;
        }
        l += 8;
    }
    l + ca.remainder().iter().zip(cb.remainder()).take_while(|(x, y)| x == y).count()
}

/// A mined substring `text[j .. j + len]` with an estimated frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampledEntry {
    pub j: usize,
    pub len: usize,
    pub f: u64,
}

impl SampledEntry {
    pub fn substring<'t>(&self, text: &'t [u8]) -> &'t [u8] {
        &text[self.j..self.j + self.len]
    }
}

/// `⌈log₂ n⌉`, at least 1.
pub fn default_rounds(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

pub fn sample_positions(n: usize, s: usize, round: usize) -> Vec<u32> {
    assert!(s >= 1 && round < s, "round {round} out of range for s = {s}");
    (round..n).step_by(s).map(|p| p as u32).collect()
}

/// Sorts the sampled suffixes and computes LCPs of lexicographic neighbours.
pub fn build_sparse_structures(
    oracle: &LceOracle<'_>,
    mut positions: Vec<u32>,
    exec: Execution,
) -> (Vec<u32>, Vec<u32>) {
    // Positions are distinct, so the in-place unstable sort yields a unique order.
    par::sort_unstable_by(exec, &mut positions, |&a, &b| oracle.compare_suffixes(a as usize, b as usize));
    let mut slcp = vec![0u32; positions.len()];
    for r in 1..positions.len() {
        slcp[r] = oracle.lce(positions[r - 1] as usize, positions[r] as usize) as u32;
    }
    (positions, slcp)
}

/// Top-K substrings by frequency among the sampled suffixes.
pub fn round_top_k(ssa: &[u32], slcp: &[u32], n: usize, k: usize, exec: Execution) -> Vec<SampledEntry> {
    select_top_k(ssa, slcp, n, k, exec)
        .triples
        .into_iter()
        .map(|t| SampledEntry { j: ssa[t.lb as usize] as usize, len: t.lcp as usize, f: t.frequency() as u64 })
        .collect()
}

/// Sums the frequencies of substrings present in both lists and keeps the K largest.
///
/// Ties are broken by shorter length, then lexicographically.
pub fn merge_round_lists(
    prev: Vec<SampledEntry>,
    cur: Vec<SampledEntry>,
    k: usize,
    oracle: &LceOracle<'_>,
    exec: Execution,
) -> Vec<SampledEntry> {
    let mut all = prev;
    all.extend(cur);
    let lex = |a: &SampledEntry, b: &SampledEntry| oracle.compare_substrings((a.j, a.len), (b.j, b.len));
    par::sort_by(exec, &mut all, lex);
    let mut merged: Vec<SampledEntry> = Vec::with_capacity(all.len());
    for e in all {
        match merged.last_mut() {
            Some(last) if lex(last, &e) == Ordering::Equal => last.f += e.f,
            _ => merged.push(e),
        }
    }
    // Stable, so lexicographic order survives among equal (f, len).
    par::sort_by(exec, &mut merged, |a, b| (Reverse(a.f), a.len).cmp(&(Reverse(b.f), b.len)));
    merged.truncate(k);
    merged
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxConfig {
    /// Number of rounds; `None` means [`default_rounds`].
    pub s: Option<usize>,
    pub strategy: LceStrategy,
    /// Per-round list length is `K * oversample`.
    pub oversample: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            s: None,
            strategy: LceStrategy::DirectCompare,
            oversample: 1,
            seed: DEFAULT_SEED,
            exec: Execution::default(),
        }
    }
}

impl ApproxConfig {
    pub fn rounds(&self, n: usize) -> usize {
        self.s.unwrap_or_else(|| default_rounds(n)).clamp(1, n.max(1))
    }
}

/// Runs all rounds and returns at most K entries with lower-bound frequencies.
pub fn approximate_top_k(text: &[u8], k: usize, config: &ApproxConfig) -> Vec<SampledEntry> {
    let n = text.len();
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let s = config.rounds(n);
    let per_round = k.saturating_mul(config.oversample.max(1));
    let oracle = LceOracle::with_seed(text, config.strategy, config.seed);
    let mut result = Vec::new();
    for round in 0..s {
        let positions = sample_positions(n, s, round);
        let (ssa, slcp) = build_sparse_structures(&oracle, positions, config.exec);
        let cur = round_top_k(&ssa, &slcp, n, per_round, config.exec);
        drop((ssa, slcp));
        result = merge_round_lists(result, cur, per_round, &oracle, config.exec);
    }
    result.truncate(k);
    result
}
