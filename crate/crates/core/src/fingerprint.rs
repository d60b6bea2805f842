//! Karp–Rabin fingerprints modulo the Mersenne prime 2^61 − 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MODULUS: u64 = (1 << 61) - 1;

/// Seed used when none is configured, so that runs are reproducible.
pub const DEFAULT_SEED: u64 = 0x0005_eed0_f0dd_ba11;

#[inline]
pub fn mul_mod(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let r = (x as u64 & MODULUS) + (x >> 61) as u64;
    let r = (r & MODULUS) + (r >> 61);
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

/// Letters are shifted by one so that no byte maps to the zero residue.
#[inline]
fn letter(b: u8) -> u64 {
    b as u64 + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fingerprinter {
    seed: u64,
    base: u64,
}

impl Default for Fingerprinter {
    fn default() -> Self {
        Self::new(DEFAULT_SEED)
    }
}

impl Fingerprinter {
    /// Draws the base uniformly from `[2, MODULUS - 2]`.
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = rng.gen_range(2..=MODULUS - 2);
        Fingerprinter { seed, base }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Horner evaluation; the empty sequence maps to 0.
    pub fn fingerprint(&self, bytes: &[u8]) -> u64 {
        bytes.iter().fold(0, |h, &b| add_mod(mul_mod(h, self.base), letter(b)))
    }

    pub fn pow(&self, mut exp: u64) -> u64 {
        let mut result = 1;
        let mut base = self.base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = mul_mod(result, base);
            }
            base = mul_mod(base, base);
            exp >>= 1;
        }
        result
    }

    /// Fingerprints of every length-`len` window, left to right.
    pub fn windows<'a>(&'a self, text: &'a [u8], len: usize) -> RollingWindows<'a> {
        RollingWindows::new(self, text, len)
    }

    pub fn prefix_table(&self, text: &[u8]) -> PrefixFingerprints {
        PrefixFingerprints::new(self, text)
    }
}

/// Rolling fingerprint over a fixed window length.
pub struct RollingWindows<'a> {
    text: &'a [u8],
    len: usize,
    base: u64,
    /// base^(len-1), the weight of the outgoing letter.
    lead: u64,
    next_start: usize,
    current: u64,
}

impl<'a> RollingWindows<'a> {
    fn new(fpr: &Fingerprinter, text: &'a [u8], len: usize) -> Self {
        let current = if len >= 1 && len <= text.len() { fpr.fingerprint(&text[..len]) } else { 0 };
        RollingWindows {
            text,
            len,
            base: fpr.base,
            lead: if len == 0 { 0 } else { fpr.pow(len as u64 - 1) },
            next_start: 0,
            current,
        }
    }
}

impl Iterator for RollingWindows<'_> {
    /// `(start, fingerprint)` of each window.
    type Item = (usize, u64);

    #[inline]
    fn next(&mut self) -> Option<(usize, u64)> {
        let start = self.next_start;
        if self.len == 0 || start + self.len > self.text.len() {
            return None;
        }
        if start > 0 {
            let out = mul_mod(letter(self.text[start - 1]), self.lead);
            let h = mul_mod(sub_mod(self.current, out), self.base);
            self.current = add_mod(h, letter(self.text[start + self.len - 1]));
        }
        self.next_start += 1;
        Some((start, self.current))
    }
}

/// `prefix[i]` is the fingerprint of `text[..i]`; any fragment's fingerprint is then O(1).
#[derive(Clone, Debug)]
pub struct PrefixFingerprints {
    prefix: Vec<u64>,
    powers: Vec<u64>,
}

impl PrefixFingerprints {
    pub fn new(fpr: &Fingerprinter, text: &[u8]) -> Self {
        let mut prefix = Vec::with_capacity(text.len() + 1);
        let mut powers = Vec::with_capacity(text.len() + 1);
        prefix.push(0);
        powers.push(1);
        let mut h = 0;
        let mut p = 1;
        for &b in text {
            h = add_mod(mul_mod(h, fpr.base), letter(b));
            p = mul_mod(p, fpr.base);
            prefix.push(h);
            powers.push(p);
        }
        PrefixFingerprints { prefix, powers }
    }

    /// Fingerprint of `text[start..start + len]`.
    #[inline]
    pub fn fragment(&self, start: usize, len: usize) -> u64 {
        let shifted = mul_mod(self.prefix[start], self.powers[len]);
        sub_mod(self.prefix[start + len], shifted)
    }

    pub fn size_bytes(&self) -> usize {
        (self.prefix.len() + self.powers.len()) * std::mem::size_of::<u64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashMap;

    #[test]
    fn empty_is_zero() {
        assert_eq!(Fingerprinter::default().fingerprint(b""), 0);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = Fingerprinter::new(7);
        let b = Fingerprinter::new(7);
        assert_eq!(a.fingerprint(b"banana"), b.fingerprint(b"banana"));
        assert_ne!(Fingerprinter::new(8).base(), a.base());
        assert!(a.base() >= 2 && a.base() <= MODULUS - 2);
    }

    #[test]
    fn mul_mod_matches_wide_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let a = rng.gen_range(0..MODULUS);
            let b = rng.gen_range(0..MODULUS);
            let expected = ((a as u128 * b as u128) % MODULUS as u128) as u64;
            assert_eq!(mul_mod(a, b), expected);
        }
        assert_eq!(mul_mod(MODULUS - 1, MODULUS - 1), 1);
    }

    #[test]
    fn prefix_table_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let text: Vec<u8> = (0..4096).map(|_| rng.gen_range(b'a'..=b'd')).collect();
        let fpr = Fingerprinter::new(3);
        let table = fpr.prefix_table(&text);
        for _ in 0..1000 {
            let i = rng.gen_range(0..text.len());
            let j = rng.gen_range(i..text.len());
            assert_eq!(table.fragment(i, j - i + 1), fpr.fingerprint(&text[i..=j]));
        }
    }

    #[test]
    fn rolling_matches_direct_on_banana() {
        let fpr = Fingerprinter::default();
        let text = b"banana";
        let rolled: Vec<_> = fpr.windows(text, 2).collect();
        assert_eq!(rolled.len(), 5);
        for (start, fp) in rolled {
            assert_eq!(fp, fpr.fingerprint(&text[start..start + 2]));
        }
        assert_eq!(fpr.windows(text, 7).count(), 0);
        assert_eq!(fpr.windows(text, 6).count(), 1);
    }

    #[test]
    fn no_collisions_among_sampled_distinct_substrings() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let text: Vec<u8> = (0..65_536).map(|_| rng.gen()).collect();
        let fpr = Fingerprinter::default();
        let table = fpr.prefix_table(&text);
        let mut seen: HashMap<u64, (usize, usize)> = HashMap::new();
        let mut collisions = 0;
        for _ in 0..(1 << 20) {
            let len = rng.gen_range(1..=32);
            let start = rng.gen_range(0..=text.len() - len);
            let key = table.fragment(start, len);
            match seen.get(&key) {
                Some(&(s, l)) => {
                    if text[s..s + l] != text[start..start + len] {
                        collisions += 1;
                    }
                }
                None => {
                    seen.insert(key, (start, len));
                }
            }
        }
        assert_eq!(collisions, 0);
    }
}
