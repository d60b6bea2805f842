//! Workloads, quality metrics, corpora and the benchmark harness.

pub mod bench;
pub mod corpus;
pub mod metrics;
pub mod rss;
pub mod workload;

pub use bench::{
    run_benchmark, write_report_csv, ConstructionMetrics, EngineUnderTest, LatencyStats, MetricsReport, Workload,
};
pub use corpus::{dna_corpus, generate_corpus, prose_corpus, uniform_step_weights, CorpusKind};
pub use metrics::{accuracy, evaluate, ndcg, relative_error, true_frequencies, QualityReport};
pub use rss::{current_rss_bytes, peak_rss_bytes};
pub use workload::{generate_workload, read_workload, write_workload, WorkloadConfig};
