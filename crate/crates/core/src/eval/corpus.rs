//! Synthetic corpora standing in for real datasets: English-like prose and DNA-like sequence.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Prose,
    Dna,
}

impl std::str::FromStr for CorpusKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prose" | "text" | "english" => Ok(CorpusKind::Prose),
            "dna" => Ok(CorpusKind::Dna),
            other => Err(format!("unknown corpus kind '{other}' (expected prose or dna)")),
        }
    }
}

pub fn generate_corpus(kind: CorpusKind, n: usize, seed: u64) -> Vec<u8> {
    match kind {
        CorpusKind::Prose => prose_corpus(n, seed),
        CorpusKind::Dna => dna_corpus(n, seed),
    }
}

/// English letter frequencies (per mille), a–z.
const LETTER_FREQ: [u32; 26] =
    [82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24, 67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2, 20, 1];

const VOCABULARY: usize = 60_000;

/// Zipf-distributed words from a synthetic vocabulary, in sentences and paragraphs, with a
/// pool of recurring multi-word phrases.
pub fn prose_corpus(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = WeightedIndex::new(LETTER_FREQ).unwrap();
    let len_dist = WeightedIndex::new([3u32, 14, 18, 16, 13, 11, 9, 7, 5, 3, 2, 1]).unwrap();
    let mut vocab: Vec<Vec<u8>> = Vec::with_capacity(VOCABULARY);
    let mut seen = std::collections::HashSet::new();
    while vocab.len() < VOCABULARY {
        // Frequent words tend to be short.
        let max_len = if vocab.len() < 100 { 3 } else { 12 };
        let len = (len_dist.sample(&mut rng) + 1).min(max_len);
        let w: Vec<u8> = (0..len).map(|_| b'a' + letters.sample(&mut rng) as u8).collect();
        if seen.insert(w.clone()) {
            vocab.push(w);
        }
    }
    let zipf = Zipf::new(VOCABULARY as u64, 1.07).unwrap();
    let word = |rng: &mut ChaCha8Rng| -> usize { zipf.sample(rng) as usize - 1 };
    let phrases: Vec<Vec<usize>> = (0..5000)
        .map(|_| {
            let len = rng.gen_range(2..=5);
            (0..len).map(|_| word(&mut rng)).collect()
        })
        .collect();
    let phrase_zipf = Zipf::new(phrases.len() as u64, 1.0).unwrap();

    let mut out = Vec::with_capacity(n + 64);
    let mut sentence_left = 0usize;
    let mut sentences_in_paragraph = 0usize;
    let mut start_of_sentence = true;
    while out.len() < n {
        if sentence_left == 0 {
            if !out.is_empty() {
                out.push(b'.');
                sentences_in_paragraph += 1;
                if sentences_in_paragraph >= rng.gen_range(3..8) {
                    out.push(b'\n');
                    sentences_in_paragraph = 0;
                } else {
                    out.push(b' ');
                }
            }
            sentence_left = rng.gen_range(6..24);
            start_of_sentence = true;
        }
        let words: Vec<usize> = if rng.gen_bool(0.15) {
            phrases[phrase_zipf.sample(&mut rng) as usize - 1].clone()
        } else {
            vec![word(&mut rng)]
        };
        for w in words {
            if !start_of_sentence {
                if rng.gen_bool(0.06) {
                    out.push(b',');
                }
                out.push(b' ');
            }
            let mut bytes = vocab[w].clone();
            if start_of_sentence {
                bytes[0] = bytes[0].to_ascii_uppercase();
                start_of_sentence = false;
            }
            out.extend_from_slice(&bytes);
            sentence_left = sentence_left.saturating_sub(1);
        }
    }
    out.truncate(n);
    out
}

/// Random background sequence with interspersed mutated copies of repeat families and
/// short tandem repeats.
pub fn dna_corpus(n: usize, seed: u64) -> Vec<u8> {
    const BASES: [u8; 4] = *b"ACGT";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gc = WeightedIndex::new([29u32, 21, 21, 29]).unwrap();
    let families: Vec<Vec<u8>> = (0..400)
        .map(|_| {
            let len = rng.gen_range(60..600);
            (0..len).map(|_| BASES[gc.sample(&mut rng)]).collect()
        })
        .collect();
    let family_zipf = Zipf::new(families.len() as u64, 1.0).unwrap();
    let mut out = Vec::with_capacity(n + 1024);
    while out.len() < n {
        let roll: f64 = rng.gen();
        if roll < 0.45 {
            let fam = &families[family_zipf.sample(&mut rng) as usize - 1];
            let divergence = rng.gen_range(0.01..0.15);
            // Partial copies are common: take a random sub-fragment.
            let a = rng.gen_range(0..fam.len() / 2);
            let b = rng.gen_range(a + fam.len() / 4..=fam.len());
            for &base in &fam[a..b] {
                out.push(if rng.gen_bool(divergence) { BASES[rng.gen_range(0..4)] } else { base });
            }
        } else if roll < 0.50 {
            let unit_len = rng.gen_range(1..=6);
            let unit: Vec<u8> = (0..unit_len).map(|_| BASES[rng.gen_range(0..4)]).collect();
            let copies = rng.gen_range(5..40);
            for _ in 0..copies {
                out.extend_from_slice(&unit);
            }
        } else {
            let len = rng.gen_range(50..1500);
            out.extend((0..len).map(|_| BASES[gc.sample(&mut rng)]));
        }
    }
    out.truncate(n);
    out
}

/// Weights drawn uniformly from {0.7, 0.75, ..., 1.0}.
pub fn uniform_step_weights(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| 0.7 + 0.05 * rng.gen_range(0..=6) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_alphabets() {
        let p = prose_corpus(100_000, 1);
        assert_eq!(p.len(), 100_000);
        assert!(p.iter().all(|&b| b.is_ascii_alphabetic() || b" .,\n".contains(&b)));
        let d = dna_corpus(100_000, 1);
        assert_eq!(d.len(), 100_000);
        assert!(d.iter().all(|b| b"ACGT".contains(b)));
        assert_eq!(prose_corpus(5000, 9), prose_corpus(5000, 9));
    }

    #[test]
    fn weights_on_grid() {
        let w = uniform_step_weights(10_000, 2);
        for x in &w {
            let steps = (x - 0.7) / 0.05;
            assert!((steps - steps.round()).abs() < 1e-9 && (0.0..=6.0 + 1e-9).contains(&steps));
        }
        assert!(w.contains(&0.7) && w.iter().any(|&x| (x - 1.0).abs() < 1e-12));
    }
}
