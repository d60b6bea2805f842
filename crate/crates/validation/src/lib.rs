//! Enumeration oracles for the acceptance suite, independent of the suffix structures they check.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

pub fn naive_count(text: &[u8], p: &[u8]) -> u64 {
    if p.is_empty() || p.len() > text.len() {
        return 0;
    }
    text.windows(p.len()).filter(|w| *w == p).count() as u64
}

/// Distinct substrings grouped as suffix-tree nodes group them: equal frequency, equal maximal
/// right extension and equal count of lexicographically smaller suffixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteNode {
    pub f: u64,
    pub sd: usize,
    pub lb: usize,
    /// Ascending and contiguous.
    pub lengths: Vec<usize>,
}

/// Every distinct substring of `text`, grouped into nodes and sorted by (frequency descending,
/// string depth, rank). Quadratic in n; meant for texts of a few thousand bytes.
pub fn brute_nodes(text: &[u8]) -> Vec<BruteNode> {
    let n = text.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
    let smaller = |p: &[u8]| sorted.partition_point(|&s| &text[s..] < p);
    let mut groups: HashMap<(u64, usize, usize), Vec<usize>> = HashMap::new();

    // Repeated substrings, one length at a time. Once a length has no repeat, no longer one does.
    for len in 1..=n {
        let mut occ: HashMap<&[u8], Vec<usize>> = HashMap::new();
        for i in 0..=n - len {
            occ.entry(&text[i..i + len]).or_default().push(i);
        }
        let mut repeated = false;
        for (pat, pos) in occ {
            if pos.len() < 2 {
                continue;
            }
            repeated = true;
            let mut sd = len;
            while pos.iter().all(|&i| i + sd < n && text[i + sd] == text[pos[0] + sd]) {
                sd += 1;
            }
            groups.entry((pos.len() as u64, sd, smaller(pat))).or_default().push(len);
        }
        if !repeated {
            break;
        }
    }
    // Substrings occurring once start where the suffix stops matching every other suffix.
    for i in 0..n {
        let longest = (0..n)
            .filter(|&j| j != i)
            .map(|j| text[i..].iter().zip(&text[j..]).take_while(|(a, b)| a == b).count())
            .max()
            .unwrap_or(0);
        if longest < n - i {
            groups.entry((1, n - i, smaller(&text[i..]))).or_default().extend(longest + 1..=n - i);
        }
    }
    let mut nodes: Vec<BruteNode> = groups
        .into_iter()
        .map(|((f, sd, lb), mut lengths)| {
            lengths.sort_unstable();
            BruteNode { f, sd, lb, lengths }
        })
        .collect();
    nodes.sort_by_key(|v| (Reverse(v.f), v.sd, v.lb));
    nodes
}

/// `(τ_K, L_K)`, with L_K counting every length of the node holding the K-th substring.
/// `None` when there are fewer than K distinct substrings.
pub fn brute_tune_by_k(nodes: &[BruteNode], k: usize) -> Option<(u64, usize)> {
    let (mut seen, mut lengths) = (0, BTreeSet::<usize>::new());
    for v in nodes {
        seen += v.lengths.len();
        lengths.extend(&v.lengths);
        if seen >= k {
            return Some((v.f, lengths.len()));
        }
    }
    None
}

/// `(K_τ, L_τ)`: distinct substrings occurring at least τ times, and their distinct lengths.
pub fn brute_tune_by_tau(nodes: &[BruteNode], tau: u64) -> (u64, usize) {
    let kept = nodes.iter().filter(|v| v.f >= tau);
    let count = kept.clone().map(|v| v.lengths.len() as u64).sum();
    let lengths: BTreeSet<usize> = kept.flat_map(|v| v.lengths.iter().copied()).collect();
    (count, lengths.len())
}

/// The `usi` binary next to the running test executable, i.e. in the same target profile dir.
pub fn usi_binary() -> PathBuf {
    let exe = std::env::current_exe().expect("current exe");
    let profile_dir = exe.parent().and_then(|deps| deps.parent()).expect("target profile dir");
    let bin = profile_dir.join(format!("usi{}", std::env::consts::EXE_SUFFIX));
    assert!(bin.exists(), "{} not found; build it with `cargo build -p usi-cli` in the same profile", bin.display());
    bin
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aaaa_is_one_chain() {
        let nodes = brute_nodes(b"aaaa");
        let got: Vec<(u64, usize, usize, Vec<usize>)> =
            nodes.into_iter().map(|v| (v.f, v.sd, v.lb, v.lengths)).collect();
        assert_eq!(got, vec![(4, 1, 0, vec![1]), (3, 2, 1, vec![2]), (2, 3, 2, vec![3]), (1, 4, 3, vec![4])]);
    }

    #[test]
    fn banana() {
        let nodes = brute_nodes(b"banana");
        let total: usize = nodes.iter().map(|v| v.lengths.len()).sum();
        assert_eq!(total, 15);
        // "a" (3), then {"n", "na"} and {"an", "ana"}, both twice; the shallower node first.
        assert_eq!((nodes[0].f, &nodes[0].lengths[..]), (3, &[1][..]));
        assert_eq!((nodes[1].f, nodes[1].sd, &nodes[1].lengths[..]), (2, 2, &[1, 2][..]));
        assert_eq!((nodes[2].f, nodes[2].sd, &nodes[2].lengths[..]), (2, 3, &[2, 3][..]));
        assert_eq!(brute_tune_by_k(&nodes, 2), Some((2, 2)));
        assert_eq!(brute_tune_by_tau(&nodes, 2), (5, 3));
        assert_eq!(brute_tune_by_k(&nodes, 16), None);
    }

    #[test]
    fn counts_overlapping_occurrences() {
        assert_eq!(naive_count(b"aaaa", b"aa"), 3);
        assert_eq!(naive_count(b"ab", b"abc"), 0);
    }
}
