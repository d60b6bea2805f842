//! Count-min sketch and a HeavyKeeper-style decaying sketch over 64-bit keys.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fingerprint::{add_mod, mul_mod, MODULUS};

/// `((a·x + b) mod p) mod w` with `p = 2^61 − 1`.
#[derive(Clone, Copy, Debug)]
struct PairwiseHash {
    a: u64,
    b: u64,
}

impl PairwiseHash {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        PairwiseHash { a: rng.gen_range(1..MODULUS), b: rng.gen_range(0..MODULUS) }
    }

    #[inline]
    fn bucket(&self, x: u64, width: usize) -> usize {
        let x = x % MODULUS;
        (add_mod(mul_mod(self.a, x), self.b) % width as u64) as usize
    }
}

#[derive(Clone, Debug)]
pub struct CountMinSketch {
    width: usize,
    hashes: Vec<PairwiseHash>,
    counters: Vec<u64>,
}

impl CountMinSketch {
    pub const DEFAULT_DEPTH: usize = 4;
    pub const DEFAULT_WIDTH: usize = 1 << 16;

    pub fn new(depth: usize, width: usize, seed: u64) -> Self {
        assert!(depth >= 1 && width >= 1, "sketch dimensions must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CountMinSketch {
            width,
            hashes: (0..depth).map(|_| PairwiseHash::random(&mut rng)).collect(),
            counters: vec![0; depth * width],
        }
    }

    /// Zeroes every counter, keeping the hash functions.
    pub fn clear(&mut self) {
        self.counters.fill(0);
    }

    pub fn depth(&self) -> usize {
        self.hashes.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Adds `count` to `key` and returns the new estimate.
    pub fn add(&mut self, key: u64, count: u64) -> u64 {
        let mut est = u64::MAX;
        for (row, h) in self.hashes.iter().enumerate() {
            let c = &mut self.counters[row * self.width + h.bucket(key, self.width)];
            *c += count;
            est = est.min(*c);
        }
        est
    }

    /// Never below the true count.
    pub fn estimate(&self, key: u64) -> u64 {
        self.hashes
            .iter()
            .enumerate()
            .map(|(row, h)| self.counters[row * self.width + h.bucket(key, self.width)])
            .min()
            .unwrap_or(0)
    }

    pub fn size_bytes(&self) -> usize {
        self.counters.len() * std::mem::size_of::<u64>() + self.hashes.len() * 16
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Bucket {
    key: u64,
    count: u64,
}

/// Buckets own one key each; a different key hashing there decays the owner's count with
/// probability `b^-count` and takes the bucket over once it reaches zero.
#[derive(Clone, Debug)]
pub struct HeavyKeeper {
    width: usize,
    hashes: Vec<PairwiseHash>,
    buckets: Vec<Bucket>,
    /// `decay_prob[c] = b^-c`; counts beyond the table never decay.
    decay_prob: Vec<f64>,
    rng: ChaCha8Rng,
}

impl HeavyKeeper {
    pub fn new(depth: usize, width: usize, decay_base: f64, seed: u64) -> Self {
        assert!(depth >= 1 && width >= 1, "sketch dimensions must be positive");
        assert!(decay_base > 1.0, "decay base must exceed 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hashes = (0..depth).map(|_| PairwiseHash::random(&mut rng)).collect();
        let mut decay_prob = Vec::new();
        let mut p = 1.0;
        while p > 1e-12 {
            decay_prob.push(p);
            p /= decay_base;
        }
        HeavyKeeper { width, hashes, buckets: vec![Bucket::default(); depth * width], decay_prob, rng }
    }

    /// Records one arrival of `key` and returns its estimate afterwards.
    pub fn insert(&mut self, key: u64) -> u64 {
        let mut est = 0;
        for (row, h) in self.hashes.iter().enumerate() {
            let b = &mut self.buckets[row * self.width + h.bucket(key, self.width)];
            if b.count == 0 {
                *b = Bucket { key, count: 1 };
            } else if b.key == key {
                b.count += 1;
            } else if let Some(&p) = self.decay_prob.get(b.count as usize) {
                if self.rng.gen::<f64>() < p {
                    b.count -= 1;
                    if b.count == 0 {
                        *b = Bucket { key, count: 1 };
                    }
                }
            }
            if b.key == key {
                est = est.max(b.count);
            }
        }
        est
    }

    pub fn estimate(&self, key: u64) -> u64 {
        self.hashes
            .iter()
            .enumerate()
            .map(|(row, h)| self.buckets[row * self.width + h.bucket(key, self.width)])
            .filter(|b| b.key == key)
            .map(|b| b.count)
            .max()
            .unwrap_or(0)
    }

    pub fn size_bytes(&self) -> usize {
        self.buckets.len() * std::mem::size_of::<Bucket>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn count_min_never_undercounts() {
        let mut cms = CountMinSketch::new(4, 64, 1);
        let mut truth: HashMap<u64, u64> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20_000 {
            let key = rng.gen_range(0..500u64).pow(2);
            cms.add(key, 1);
            *truth.entry(key).or_default() += 1;
        }
        for (k, c) in truth {
            assert!(cms.estimate(k) >= c);
        }
    }

    #[test]
    fn count_min_exact_without_collisions() {
        let mut cms = CountMinSketch::new(4, 1 << 16, 3);
        for _ in 0..1000 {
            cms.add(42, 1);
        }
        assert_eq!(cms.estimate(42), 1000);
        assert_eq!(cms.add(7, 5), 5);
    }

    #[test]
    fn heavy_keeper_never_overcounts_and_keeps_heavy_keys() {
        let mut hk = HeavyKeeper::new(4, 256, 1.08, 4);
        let mut truth: HashMap<u64, u64> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..50_000u64 {
            let key = if i % 3 == 0 { 99 } else { rng.gen_range(1000..100_000) };
            let est = hk.insert(key);
            let t = truth.entry(key).or_default();
            *t += 1;
            assert!(est <= *t);
        }
        let heavy = hk.estimate(99);
        assert!(heavy as f64 >= 0.9 * truth[&99] as f64, "{heavy}");
    }
}
