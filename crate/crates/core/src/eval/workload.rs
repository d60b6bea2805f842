//! Query workloads: a share of patterns drawn from the most frequent substrings, the rest
//! repeated from that selection or cut at random from the text.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UsiError};
use crate::par::Execution;
use crate::suffix::SuffixArrayIndex;
use crate::topk::select_top_k;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub total_queries: usize,
    pub frequent_fraction: f64,
    /// The frequent pool is the top-(n / pool_divisor) substrings.
    pub pool_divisor: usize,
    /// Inclusive length range of random patterns (upper end clipped to n).
    pub length_range: (usize, usize),
    pub seed: u64,
}

impl WorkloadConfig {
    pub const DEFAULT_LENGTH_RANGE: (usize, usize) = (1, 5000);

    /// 90% from the top-n/50 substrings.
    pub fn w1(total_queries: usize, seed: u64) -> Self {
        WorkloadConfig {
            total_queries,
            frequent_fraction: 0.9,
            pool_divisor: 50,
            length_range: Self::DEFAULT_LENGTH_RANGE,
            seed,
        }
    }

    /// p% from the top-n/100 substrings.
    pub fn w2(p: u32, total_queries: usize, seed: u64) -> Self {
        WorkloadConfig { frequent_fraction: p as f64 / 100.0, pool_divisor: 100, ..Self::w1(total_queries, seed) }
    }

    fn validate(&self, n: usize) -> Result<usize> {
        if !(0.0..=1.0).contains(&self.frequent_fraction) {
            return Err(UsiError::InvalidParameter(format!(
                "frequent fraction {} not in [0, 1]",
                self.frequent_fraction
            )));
        }
        if self.length_range.0 < 1 || self.length_range.0 > self.length_range.1 {
            return Err(UsiError::InvalidParameter(format!("bad length range {:?}", self.length_range)));
        }
        if self.length_range.0 > n {
            return Err(UsiError::InvalidParameter(format!(
                "minimum pattern length {} exceeds n = {n}",
                self.length_range.0
            )));
        }
        let pool = n.checked_div(self.pool_divisor).unwrap_or(0);
        if pool < 1 && self.frequent_fraction > 0.0 {
            return Err(UsiError::InvalidParameter(format!(
                "n / pool_divisor = {n} / {} leaves an empty frequent pool",
                self.pool_divisor
            )));
        }
        Ok(pool)
    }
}

/// Deterministic under `cfg.seed`; every pattern occurs in `text`.
pub fn generate_workload(
    text: &[u8],
    idx: &SuffixArrayIndex,
    cfg: &WorkloadConfig,
    exec: Execution,
) -> Result<Vec<Vec<u8>>> {
    let n = text.len();
    let pool_size = cfg.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_frequent = (cfg.total_queries as f64 * cfg.frequent_fraction).round() as usize;
    let mut out: Vec<Vec<u8>> = Vec::with_capacity(cfg.total_queries);
    if n_frequent > 0 {
        let pool = select_top_k(idx.sa(), idx.lcp(), n, pool_size, exec).triples;
        for _ in 0..n_frequent {
            let t = pool[rng.gen_range(0..pool.len())];
            out.push(t.substring(text, idx.sa()).to_vec());
        }
    }
    let (lo, hi) = (cfg.length_range.0, cfg.length_range.1.min(n));
    while out.len() < cfg.total_queries {
        if n_frequent > 0 && rng.gen_bool(0.5) {
            let p = out[rng.gen_range(0..n_frequent)].clone();
            out.push(p);
        } else {
            let len = rng.gen_range(lo..=hi);
            let start = rng.gen_range(0..=n - len);
            out.push(text[start..start + len].to_vec());
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

/// `\\` for a backslash, `\xHH` for bytes outside printable ASCII, everything else verbatim.
pub fn escape_pattern(p: &[u8]) -> String {
    let mut s = String::with_capacity(p.len());
    for &b in p {
        match b {
            b'\\' => s.push_str("\\\\"),
            0x20..=0x7e => s.push(b as char),
            _ => s.push_str(&format!("\\x{b:02x}")),
        }
    }
    s
}

pub fn unescape_pattern(line: &str) -> Result<Vec<u8>> {
    let bytes = line.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'\\' {
            out.push(bytes[i]);
            i += 1;
            continue;
        }
        match bytes.get(i + 1) {
            Some(b'\\') => {
                out.push(b'\\');
                i += 2;
            }
            Some(b'x') => {
                let hex = line
                    .get(i + 2..i + 4)
                    .and_then(|h| u8::from_str_radix(h, 16).ok())
                    .ok_or_else(|| UsiError::Corrupt(format!("bad escape in pattern line '{line}'")))?;
                out.push(hex);
                i += 4;
            }
            _ => return Err(UsiError::Corrupt(format!("bad escape in pattern line '{line}'"))),
        }
    }
    Ok(out)
}

pub fn write_workload<W: Write>(mut sink: W, patterns: &[Vec<u8>]) -> Result<()> {
    for p in patterns {
        writeln!(sink, "{}", escape_pattern(p))?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads one pattern per line; empty lines are skipped.
pub fn read_workload<R: BufRead>(source: R) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for line in source.lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if !line.is_empty() {
            out.push(unescape_pattern(line)?);
        }
    }
    Ok(out)
}
