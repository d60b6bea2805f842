//! Latency, size and construction measurements, written as long-format CSV.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::metrics::QualityReport;
use crate::competitors::QueryEngine;
use crate::error::{Result, UsiError};

#[derive(Clone, Debug)]
pub struct Workload {
    pub name: String,
    /// Hash of the text the workload was generated from, if known.
    pub text_hash: Option<u64>,
    pub patterns: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructionMetrics {
    pub seconds: f64,
    pub peak_bytes: Option<u64>,
}

pub struct EngineUnderTest {
    pub engine: Box<dyn QueryEngine + Send>,
    pub construction: ConstructionMetrics,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub queries: usize,
    pub mean_ns: f64,
    pub median_ns: f64,
    pub p99_ns: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &mut [u64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_unstable();
        let q = |frac: f64| samples[((samples.len() - 1) as f64 * frac).round() as usize] as f64;
        Some(LatencyStats {
            queries: samples.len(),
            mean_ns: samples.iter().map(|&x| x as f64).sum::<f64>() / samples.len() as f64,
            median_ns: q(0.5),
            p99_ns: q(0.99),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub engine: String,
    pub workload: String,
    pub k: u64,
    pub s: u64,
    pub n: u64,
    pub latency: Option<LatencyStats>,
    pub index_size_bytes: u64,
    pub construction_seconds: f64,
    pub peak_construction_bytes: Option<u64>,
    pub quality: Option<QualityReport>,
}

impl MetricsReport {
    /// `(metric, value)` rows in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        let mut rows = Vec::new();
        if let Some(l) = &self.latency {
            rows.push(("queries", l.queries as f64));
            rows.push(("mean_ns", l.mean_ns));
            rows.push(("median_ns", l.median_ns));
            rows.push(("p99_ns", l.p99_ns));
        }
        rows.push(("index_size_bytes", self.index_size_bytes as f64));
        rows.push(("construction_seconds", self.construction_seconds));
        if let Some(p) = self.peak_construction_bytes {
            rows.push(("peak_construction_bytes", p as f64));
        }
        if let Some(q) = &self.quality {
            rows.push(("accuracy_true_freq", q.accuracy_true_freq));
            rows.push(("accuracy_reported_freq", q.accuracy_reported_freq));
            rows.push(("relative_error", q.relative_error));
            rows.push(("ndcg", q.ndcg));
        }
        rows
    }
}

pub const CSV_HEADER: &str = "engine,workload,K,s,n,metric,value";

pub fn write_report_csv<W: Write>(mut sink: W, reports: &[MetricsReport]) -> Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for r in reports {
        for (metric, value) in r.rows() {
            writeln!(sink, "{},{},{},{},{},{},{}", r.engine, r.workload, r.k, r.s, r.n, metric, value)?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Runs every workload `repetitions` times per engine, discarding the first run as warm-up.
///
/// Engines run one after another; per-query latencies of the kept runs are pooled. Engine
/// state is reset before every run.
pub fn run_benchmark(
    engines: &mut [EngineUnderTest],
    workloads: &[Workload],
    repetitions: usize,
    k: u64,
    s: u64,
) -> Result<Vec<MetricsReport>> {
    let mut reports = Vec::new();
    for eut in engines.iter_mut() {
        let name = eut.engine.name();
        let text_hash = xxhash_rust::xxh3::xxh3_64(eut.engine.text());
        let n = eut.engine.text().len() as u64;
        for w in workloads {
            if w.text_hash.is_some_and(|h| h != text_hash) {
                return Err(UsiError::TextMismatch { engine: name.to_string(), workload: w.name.clone() });
            }
            let mut samples: Vec<u64> = Vec::with_capacity(w.patterns.len() * repetitions.saturating_sub(1));
            for rep in 0..repetitions.max(1) {
                // Each repetition starts cold so caches cannot replay the warm-up run.
                eut.engine.reset();
                for p in &w.patterns {
                    let start = Instant::now();
                    let v = eut.engine.query(p)?;
                    let elapsed = start.elapsed();
                    std::hint::black_box(v);
                    if rep > 0 || repetitions <= 1 {
                        samples.push(duration_ns(elapsed));
                    }
                }
            }
            reports.push(MetricsReport {
                engine: name.to_string(),
                workload: w.name.clone(),
                k,
                s,
                n,
                latency: LatencyStats::from_samples(&mut samples),
                index_size_bytes: eut.engine.index_size_bytes() as u64,
                construction_seconds: eut.construction.seconds,
                peak_construction_bytes: eut.construction.peak_bytes,
                quality: None,
            });
        }
    }
    Ok(reports)
}

fn duration_ns(d: Duration) -> u64 {
    d.as_nanos().min(u64::MAX as u128) as u64
}
