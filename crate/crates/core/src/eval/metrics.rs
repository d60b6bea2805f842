//! Quality of an estimated top-K list against the exact one.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::suffix::pattern_interval;
use crate::topk::{SampledEntry, TopKTriple};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Multiset intersection of true frequencies, in percent of K.
    pub accuracy_true_freq: f64,
    /// Same, using the estimator's reported frequencies.
    pub accuracy_reported_freq: f64,
    pub relative_error: f64,
    pub ndcg: f64,
}

/// Occurrence counts of each entry's substring, located through `sa`.
pub fn true_frequencies(text: &[u8], sa: &[u32], entries: &[SampledEntry]) -> Vec<u64> {
    entries
        .iter()
        .map(|e| pattern_interval(text, sa, e.substring(text)).map_or(0, |(lb, rb)| (rb - lb + 1) as u64))
        .collect()
}

pub fn exact_frequencies(exact: &[TopKTriple]) -> Vec<u64> {
    exact.iter().map(|t| t.frequency() as u64).collect()
}

/// `|exact ∩ estimated| / |exact| × 100`, intersecting frequency multisets.
pub fn accuracy(exact: &[u64], estimated: &[u64]) -> f64 {
    if exact.is_empty() {
        return 100.0;
    }
    let mut pool: HashMap<u64, usize> = HashMap::new();
    for &f in exact {
        *pool.entry(f).or_default() += 1;
    }
    let mut hits = 0usize;
    for f in estimated.iter().take(exact.len()) {
        if let Some(c) = pool.get_mut(f) {
            if *c > 0 {
                *c -= 1;
                hits += 1;
            }
        }
    }
    hits as f64 / exact.len() as f64 * 100.0
}

/// `(Σ exact − Σ estimated) / Σ exact`, both sides in true frequencies.
pub fn relative_error(exact: &[u64], estimated: &[u64]) -> f64 {
    let a: u64 = exact.iter().sum();
    if a == 0 {
        return 0.0;
    }
    let b: u64 = estimated.iter().take(exact.len()).sum();
    (a as f64 - b as f64) / a as f64
}

/// DCG of the estimated order (relevance = true frequency) over the ideal DCG of the exact list.
pub fn ndcg(exact: &[u64], estimated: &[u64]) -> f64 {
    let dcg = |rels: &mut dyn Iterator<Item = u64>| -> f64 {
        rels.enumerate().map(|(i, r)| r as f64 / ((i + 2) as f64).log2()).sum()
    };
    let mut ideal: Vec<u64> = exact.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(&mut ideal.into_iter());
    if idcg == 0.0 {
        return if estimated.is_empty() { 1.0 } else { 0.0 };
    }
    dcg(&mut estimated.iter().copied().take(exact.len())) / idcg
}

pub fn evaluate(text: &[u8], sa: &[u32], exact: &[TopKTriple], estimated: &[SampledEntry]) -> QualityReport {
    let exact_f = exact_frequencies(exact);
    let true_f = true_frequencies(text, sa, estimated);
    let reported: Vec<u64> = estimated.iter().map(|e| e.f).collect();
    QualityReport {
        accuracy_true_freq: accuracy(&exact_f, &true_f),
        accuracy_reported_freq: accuracy(&exact_f, &reported),
        relative_error: relative_error(&exact_f, &true_f),
        ndcg: ndcg(&exact_f, &true_f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[3, 2, 2], &[3, 2, 2]), 100.0);
        assert_eq!(accuracy(&[3, 2, 2], &[]), 0.0);
        assert!((accuracy(&[3, 2, 2], &[3, 2, 1]) - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(accuracy(&[5, 5], &[5, 5, 5]), 100.0);
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(&[4, 3], &[4, 3]), 0.0);
        assert!((relative_error(&[4, 3], &[4, 2]) - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn ndcg_examples() {
        assert!((ndcg(&[5, 3, 3, 1], &[5, 3, 3, 1]) - 1.0).abs() < 1e-12);
        assert_eq!(ndcg(&[5, 3], &[]), 0.0);
        assert!((ndcg(&[5, 3, 3], &[5, 3, 3]) - 1.0).abs() < 1e-12);
        let worse = ndcg(&[5, 3, 1], &[1, 3, 5]);
        assert!(worse < 1.0 && worse > 0.0);
    }

    #[test]
    fn evaluate_banana() {
        let text = b"banana";
        let idx = crate::suffix::SuffixArrayIndex::build(text).unwrap();
        let tables = crate::topk::TuningTables::build(&idx, crate::par::Execution::Sequential);
        let exact = crate::topk::exact_top_k(&tables, 3);
        // "a" (3), "an" (2), "b" (1)
        let est = [
            SampledEntry { j: 1, len: 1, f: 3 },
            SampledEntry { j: 1, len: 2, f: 2 },
            SampledEntry { j: 0, len: 1, f: 1 },
        ];
        let q = evaluate(text, idx.sa(), &exact, &est);
        assert!((q.accuracy_true_freq - 200.0 / 3.0).abs() < 1e-9);
        assert!((q.relative_error - 1.0 / 7.0).abs() < 1e-12);
        assert!(q.ndcg < 1.0);
    }
}
