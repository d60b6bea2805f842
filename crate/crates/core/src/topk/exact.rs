//! Tuning tables over the suffix-tree nodes and the exact top-K miner.

use std::cmp::Reverse;
use std::collections::HashMap;

use crate::error::{Result, UsiError};
use crate::par::{self, Execution};
use crate::suffix::{for_each_lcp_interval, SuffixArrayIndex};

/// A suffix-tree node (internal or leaf) seen through its SA interval.
///
/// It stands for `q` distinct substrings of lengths `sd - q + 1 ..= sd`, all occurring `f` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyTriple {
    pub lb: u32,
    pub rb: u32,
    /// String depth of the node.
    pub sd: u32,
    /// Letters on the edge from the parent.
    pub q: u32,
}

impl FrequencyTriple {
    #[inline]
    pub fn f(&self) -> u32 {
        self.rb - self.lb + 1
    }

    #[inline]
    pub fn parent_sd(&self) -> u32 {
        self.sd - self.q
    }

    /// Frequency descending, then string depth, then interval start.
    #[inline]
    pub fn sort_key(&self) -> (Reverse<u32>, u32, u32) {
        (Reverse(self.f()), self.sd, self.lb)
    }

    fn expand_into(&self, limit: usize, out: &mut Vec<TopKTriple>) {
        let take = (self.q as usize).min(limit);
        let base = self.parent_sd();
        out.extend((1..=take as u32).map(|l| TopKTriple { lcp: base + l, lb: self.lb, rb: self.rb }));
    }
}

/// One mined substring: `text[sa[lb] .. sa[lb] + lcp]`, occurring `rb - lb + 1` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TopKTriple {
    pub lcp: u32,
    pub lb: u32,
    pub rb: u32,
}

impl TopKTriple {
    #[inline]
    pub fn frequency(&self) -> u32 {
        self.rb - self.lb + 1
    }

    pub fn witness(&self, sa: &[u32]) -> usize {
        sa[self.lb as usize] as usize
    }

    pub fn substring<'t>(&self, text: &'t [u8], sa: &[u32]) -> &'t [u8] {
        let start = self.witness(sa);
        &text[start..start + self.lcp as usize]
    }
}

/// Emits one triple per suffix-tree node whose edge carries at least one letter.
///
/// `sa` lists suffix start positions of a text of length `n` in lexicographic order (all of them
/// or a sample) and `lcp` the LCPs of adjacent entries. Internal nodes come from the LCP interval
/// traversal; leaves have `f = 1` and string depth `n - sa[r]`.
pub fn for_each_frequency_triple<F: FnMut(FrequencyTriple)>(sa: &[u32], lcp: &[u32], n: usize, mut visit: F) {
    debug_assert_eq!(sa.len(), lcp.len());
    for_each_lcp_interval(lcp, |iv, _| {
        visit(FrequencyTriple { lb: iv.lb, rb: iv.rb, sd: iv.lcp, q: iv.lcp - iv.parent_lcp });
    });
    let m = sa.len();
    for r in 0..m {
        let sd = (n - sa[r] as usize) as u32;
        let next = if r + 1 < m { lcp[r + 1] } else { 0 };
        let parent = lcp[r].max(next);
        if sd > parent {
            visit(FrequencyTriple { lb: r as u32, rb: r as u32, sd, q: sd - parent });
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuningTables {
    t: Vec<FrequencyTriple>,
    q_prefix: Vec<u64>,
    l_prefix: Vec<u32>,
}

impl TuningTables {
    pub fn build(idx: &SuffixArrayIndex, exec: Execution) -> Self {
        Self::from_suffixes(idx.sa(), idx.lcp(), idx.len(), exec)
    }

    pub fn from_suffixes(sa: &[u32], lcp: &[u32], n: usize, exec: Execution) -> Self {
        let mut t = Vec::with_capacity(sa.len() + sa.len() / 2);
        for_each_frequency_triple(sa, lcp, n, |tr| t.push(tr));
        // Keys are unique (nested nodes differ in depth, disjoint ones in lb), so the unstable
        // sort is deterministic.
        par::sort_unstable_by_key(exec, &mut t, FrequencyTriple::sort_key);
        let mut q_prefix = Vec::with_capacity(t.len());
        let mut l_prefix = Vec::with_capacity(t.len());
        let (mut acc, mut c, mut m) = (0u64, 0u32, 0u32);
        for tr in &t {
            acc += tr.q as u64;
            if tr.sd > m {
                c += tr.sd - m;
                m = tr.sd;
            }
            q_prefix.push(acc);
            l_prefix.push(c);
        }
        TuningTables { t, q_prefix, l_prefix }
    }

    pub fn triples(&self) -> &[FrequencyTriple] {
        &self.t
    }

    pub fn q_prefix(&self) -> &[u64] {
        &self.q_prefix
    }

    pub fn l_prefix(&self) -> &[u32] {
        &self.l_prefix
    }

    /// Number of distinct substrings of the text.
    pub fn total_substrings(&self) -> u64 {
        self.q_prefix.last().copied().unwrap_or(0)
    }

    pub fn size_bytes(&self) -> usize {
        self.t.len() * (std::mem::size_of::<FrequencyTriple>() + 8 + 4)
    }

    /// Index of the triple holding the K-th listed substring.
    fn position_of_k(&self, k: u64) -> Option<usize> {
        if k == 0 || k > self.total_substrings() {
            return None;
        }
        Some(self.q_prefix.partition_point(|&q| q < k))
    }
}

pub fn build_tuning_tables(idx: &SuffixArrayIndex, exec: Execution) -> TuningTables {
    TuningTables::build(idx, exec)
}

/// Lists the K most frequent substrings, or all of them if the text has fewer.
pub fn exact_top_k(tables: &TuningTables, k: usize) -> Vec<TopKTriple> {
    let mut out = Vec::with_capacity(k.min(1 << 24));
    for tr in &tables.t {
        if out.len() >= k {
            break;
        }
        tr.expand_into(k - out.len(), &mut out);
    }
    out
}

/// `(τ_K, L_K)`: the K-th largest frequency and the number of distinct lengths up to it.
pub fn tune_by_k(tables: &TuningTables, k: u64) -> Result<(u32, u32)> {
    if k == 0 {
        return Err(UsiError::InvalidParameter("K must be at least 1".into()));
    }
    let i = tables.position_of_k(k).ok_or(UsiError::KTooLarge { k, total: tables.total_substrings() })?;
    Ok((tables.t[i].f(), tables.l_prefix[i]))
}

/// `(K_τ, L_τ)`: how many substrings occur at least τ times, and their distinct lengths.
pub fn tune_by_tau(tables: &TuningTables, tau: u32) -> (u64, u32) {
    let count = tables.t.partition_point(|tr| tr.f() >= tau);
    if count == 0 {
        (0, 0)
    } else {
        (tables.q_prefix[count - 1], tables.l_prefix[count - 1])
    }
}

/// Top-K list plus the tuning values describing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopKSelection {
    pub triples: Vec<TopKTriple>,
    /// Frequency of the last listed substring.
    pub tau_k: u32,
    pub l_k: u32,
}

impl TopKSelection {
    fn from_sorted(sorted: &[FrequencyTriple], k: usize) -> Self {
        let mut triples = Vec::with_capacity(k.min(1 << 24));
        let (mut tau_k, mut l_k) = (0, 0);
        for tr in sorted {
            if triples.len() >= k {
                break;
            }
            tr.expand_into(k - triples.len(), &mut triples);
            tau_k = tr.f();
            l_k = l_k.max(tr.sd);
        }
        TopKSelection { triples, tau_k, l_k }
    }
}

/// Same answer as [`exact_top_k`] on the tuning tables, without materialising them.
///
/// A first pass sums `q` per frequency to find the cutoff τ; a second pass keeps only triples
/// with `f ≥ τ`. Memory is proportional to the output rather than to the number of nodes.
pub fn select_top_k(sa: &[u32], lcp: &[u32], n: usize, k: usize, exec: Execution) -> TopKSelection {
    if k == 0 || sa.is_empty() {
        return TopKSelection { triples: Vec::new(), tau_k: 0, l_k: 0 };
    }
    let tau = frequency_cutoff(sa, lcp, n, k as u64);
    let mut kept = Vec::new();
    for_each_frequency_triple(sa, lcp, n, |tr| {
        if tr.f() >= tau {
            kept.push(tr);
        }
    });
    par::sort_unstable_by_key(exec, &mut kept, FrequencyTriple::sort_key);
    TopKSelection::from_sorted(&kept, k)
}

/// Largest τ such that substrings with frequency ≥ τ number at least `k` (or the smallest
/// frequency present when there are fewer than `k` substrings).
fn frequency_cutoff(sa: &[u32], lcp: &[u32], n: usize, k: u64) -> u32 {
    const DENSE: usize = 1 << 16;
    let mut dense = vec![0u64; DENSE.min(sa.len() + 1)];
    let mut sparse: HashMap<u32, u64> = HashMap::new();
    for_each_frequency_triple(sa, lcp, n, |tr| {
        let f = tr.f() as usize;
        match dense.get_mut(f) {
            Some(slot) => *slot += tr.q as u64,
            None => *sparse.entry(tr.f()).or_default() += tr.q as u64,
        }
    });
    let mut high: Vec<(u32, u64)> = sparse.into_iter().collect();
    high.sort_unstable_by_key(|&(f, _)| Reverse(f));
    let dense_desc = dense.iter().enumerate().rev().filter(|&(_, &q)| q > 0).map(|(f, &q)| (f as u32, q));
    let mut acc = 0u64;
    let mut last = 1;
    for (f, q) in high.into_iter().chain(dense_desc) {
        acc += q;
        last = f;
        if acc >= k {
            return f;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap};

    fn tables(text: &[u8]) -> (SuffixArrayIndex, TuningTables) {
        let idx = SuffixArrayIndex::build(text).unwrap();
        let t = TuningTables::build(&idx, Execution::Sequential);
        (idx, t)
    }

    fn listed(text: &[u8], idx: &SuffixArrayIndex, out: &[TopKTriple]) -> Vec<(Vec<u8>, u32)> {
        out.iter().map(|t| (t.substring(text, idx.sa()).to_vec(), t.frequency())).collect()
    }

    #[test]
    fn banana_tables() {
        let (idx, t) = tables(b"banana");
        let head: Vec<(Vec<u8>, u32, u32, u32)> = t.triples()[..3]
            .iter()
            .map(|tr| {
                let s = idx.sa()[tr.lb as usize] as usize;
                (b"banana"[s..s + tr.sd as usize].to_vec(), tr.f(), tr.q, tr.sd)
            })
            .collect();
        assert_eq!(head, vec![(b"a".to_vec(), 3, 1, 1), (b"na".to_vec(), 2, 2, 2), (b"ana".to_vec(), 2, 2, 3)]);
        assert_eq!(&t.q_prefix()[..3], &[1, 3, 5]);
        assert_eq!(&t.l_prefix()[..3], &[1, 2, 3]);
        assert_eq!(t.total_substrings(), 15);
    }

    #[test]
    fn aaaa_chain() {
        let (_, t) = tables(b"aaaa");
        let got: Vec<(u32, u32, u32)> = t.triples().iter().map(|tr| (tr.f(), tr.q, tr.sd)).collect();
        assert_eq!(got, vec![(4, 1, 1), (3, 1, 2), (2, 1, 3), (1, 1, 4)]);
        assert_eq!(t.q_prefix(), &[1, 2, 3, 4]);
        assert_eq!(t.l_prefix(), &[1, 2, 3, 4]);
        assert_eq!(tune_by_k(&t, 4).unwrap(), (1, 4));
    }

    #[test]
    fn distinct_letters_only_leaves() {
        let (_, t) = tables(b"abcdef");
        assert!(t.triples().iter().all(|tr| tr.f() == 1));
        assert_eq!(t.total_substrings(), 21);
    }

    #[test]
    fn banana_top_k() {
        let (idx, t) = tables(b"banana");
        let top3 = exact_top_k(&t, 3);
        assert_eq!(
            top3,
            vec![
                TopKTriple { lcp: 1, lb: 0, rb: 2 },
                TopKTriple { lcp: 1, lb: 4, rb: 5 },
                TopKTriple { lcp: 2, lb: 4, rb: 5 },
            ]
        );
        assert_eq!(listed(b"banana", &idx, &top3), vec![(b"a".to_vec(), 3), (b"n".to_vec(), 2), (b"na".to_vec(), 2)]);
        assert_eq!(exact_top_k(&t, 1), vec![TopKTriple { lcp: 1, lb: 0, rb: 2 }]);
        let all = exact_top_k(&t, 1000);
        let distinct: BTreeSet<Vec<u8>> = listed(b"banana", &idx, &all).into_iter().map(|(s, _)| s).collect();
        assert_eq!(all.len(), 15);
        assert_eq!(distinct.len(), 15);
    }

    #[test]
    fn banana_tuning() {
        let (_, t) = tables(b"banana");
        assert_eq!(tune_by_k(&t, 3).unwrap(), (2, 2));
        assert_eq!(tune_by_k(&t, 1).unwrap(), (3, 1));
        assert!(matches!(tune_by_k(&t, 16), Err(UsiError::KTooLarge { .. })));
        assert!(tune_by_k(&t, 0).is_err());
        assert_eq!(tune_by_tau(&t, 2), (5, 3));
        assert_eq!(tune_by_tau(&t, 3), (1, 1));
        assert_eq!(tune_by_tau(&t, 7), (0, 0));
        assert_eq!(tune_by_tau(&t, 1), (15, 6));
    }

    fn all_substring_counts(text: &[u8]) -> HashMap<&[u8], u32> {
        let mut m = HashMap::new();
        for i in 0..text.len() {
            for j in i + 1..=text.len() {
                *m.entry(&text[i..j]).or_insert(0) += 1;
            }
        }
        m
    }

    #[test]
    fn l_prefix_counts_distinct_lengths() {
        for text in [&b"mississippi"[..], b"abracadabra", b"aabbaabbab", b"banana"] {
            let (idx, t) = tables(text);
            let mut lengths = BTreeSet::new();
            for (i, tr) in t.triples().iter().enumerate() {
                for l in tr.parent_sd() + 1..=tr.sd {
                    lengths.insert(l);
                }
                assert_eq!(t.l_prefix()[i] as usize, lengths.len());
                let s = idx.sa()[tr.lb as usize] as usize;
                let counts = all_substring_counts(text);
                for l in tr.parent_sd() + 1..=tr.sd {
                    assert_eq!(counts[&text[s..s + l as usize]], tr.f());
                }
            }
        }
    }

    #[test]
    fn lean_selection_matches_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..600);
            let sigma = [2u8, 4, 26][rng.gen_range(0..3)];
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let (idx, t) = tables(&text);
            for k in [1usize, 2, 7, 50, 300, 100_000] {
                let sel = select_top_k(idx.sa(), idx.lcp(), n, k, Execution::Parallel);
                assert_eq!(sel.triples, exact_top_k(&t, k));
                if (k as u64) <= t.total_substrings() {
                    assert_eq!((sel.tau_k, sel.l_k), tune_by_k(&t, k as u64).unwrap());
                }
            }
        }
    }
}
