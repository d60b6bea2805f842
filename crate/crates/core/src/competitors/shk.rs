//! SubstringHK: HeavyKeeper's sketch-plus-summary scheme applied to the substrings of one text.
//!
//! At each position the candidate `S[i..i+ℓ]` is offered for ℓ = 1, 2, ... The walk continues to
//! the next letter only if the candidate was already in the summary when offered (a freshly
//! admitted string has not been seen before, so its extensions are not either), and then only
//! with probability `c^-ℓ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::heap::IndexedMinHeap;
use super::sketch::HeavyKeeper;
use crate::fingerprint::{add_mod, mul_mod, Fingerprinter, DEFAULT_SEED};
use crate::topk::SampledEntry;
use crate::usi::FingerprintMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShkParams {
    pub depth: usize,
    pub width: usize,
    /// HeavyKeeper decay base b.
    pub decay_base: f64,
    /// Extension base c: the candidate of length ℓ is extended with probability c^-ℓ.
    pub extension_base: f64,
    pub seed: u64,
}

impl Default for ShkParams {
    fn default() -> Self {
        ShkParams { depth: 4, width: 1 << 16, decay_base: 1.08, extension_base: 2.0, seed: DEFAULT_SEED }
    }
}

fn sketch_key(fp: u64, len: usize) -> u64 {
    fp ^ (len as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn substring_hk_mine(text: &[u8], k: usize, params: &ShkParams) -> Vec<SampledEntry> {
    assert!(params.extension_base > 1.0, "extension base must exceed 1");
    if k == 0 || text.is_empty() {
        return Vec::new();
    }
    let fpr = Fingerprinter::new(params.seed);
    let base = fpr.base();
    let mut sketch = HeavyKeeper::new(params.depth, params.width, params.decay_base, params.seed.rotate_left(17));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.rotate_left(31));
    // Summary keyed by (fingerprint, length); priority (estimate, arrival stamp).
    let mut summary: IndexedMinHeap<(u64, u32), (u64, u64)> = IndexedMinHeap::with_capacity(k.min(1 << 22));
    let mut witness: FingerprintMap<u32> = FingerprintMap::default();
    let mut stamp = 0u64;
    let n = text.len();
    for i in 0..n {
        let mut fp = 0u64;
        let mut len = 0usize;
        let mut extend_prob = 1.0;
        while i + len < n {
            fp = add_mod(mul_mod(fp, base), text[i + len] as u64 + 1);
            len += 1;
            let key = (fp, len as u32);
            let est = sketch.insert(sketch_key(fp, len));
            stamp += 1;
            let known = match summary.priority(&key) {
                Some((old, s)) => {
                    if est > old {
                        summary.set_priority(&key, (est, s));
                    }
                    true
                }
                None if summary.len() < k => {
                    summary.push(key, (est, stamp));
                    witness.insert(key, i as u32);
                    false
                }
                None => {
                    let (_, (min_est, _)) = summary.peek().unwrap();
                    if est > min_est {
                        let (victim, _) = summary.pop().unwrap();
                        witness.remove(&victim);
                        summary.push(key, (est, stamp));
                        witness.insert(key, i as u32);
                    }
                    false
                }
            };
            extend_prob /= params.extension_base;
            if !known || rng.gen::<f64>() >= extend_prob {
                break;
            }
        }
    }
    let mut out: Vec<SampledEntry> = summary
        .iter()
        .map(|(key, (est, _))| SampledEntry { j: witness[key] as usize, len: key.1 as usize, f: est })
        .collect();
    out.sort_unstable_by_key(|e| (std::cmp::Reverse(e.f), e.len, e.j));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(t: &[u8], p: &[u8]) -> u64 {
        (0..t.len()).filter(|&i| t[i..].starts_with(p)).count() as u64
    }

    #[test]
    fn distinct_letters_all_reported_once() {
        let text = b"abcdefghij";
        let got = substring_hk_mine(text, text.len(), &ShkParams::default());
        let mut letters: Vec<(u8, u64)> = got.iter().filter(|e| e.len == 1).map(|e| (text[e.j], e.f)).collect();
        letters.sort_unstable();
        assert_eq!(letters, text.iter().map(|&c| (c, 1)).collect::<Vec<_>>());
    }

    #[test]
    fn estimates_bounded_by_true_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let text: Vec<u8> = (0..5000).map(|_| b"acgt"[rng.gen_range(0..4)]).collect();
        let got = substring_hk_mine(&text, 50, &ShkParams { width: 64, ..ShkParams::default() });
        assert!(got.len() <= 50);
        for e in &got {
            let s = e.substring(&text);
            assert!(e.f <= count(&text, s));
            assert!(e.f <= (text.len() - e.len + 1) as u64);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let text = b"mississippi river mississippi delta".repeat(20);
        let a = substring_hk_mine(&text, 30, &ShkParams::default());
        let b = substring_hk_mine(&text, 30, &ShkParams::default());
        assert_eq!(a, b);
    }
}
