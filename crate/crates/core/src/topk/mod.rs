//! Exact and approximate top-K frequent substring mining.

pub mod approx;
pub mod exact;

pub use approx::{
    approximate_top_k, build_sparse_structures, default_rounds, merge_round_lists, round_top_k, sample_positions,
    ApproxConfig, LceOracle, LceStrategy, SampledEntry,
};
pub use exact::{
    build_tuning_tables, exact_top_k, for_each_frequency_triple, select_top_k, tune_by_k, tune_by_tau, FrequencyTriple,
    TopKSelection, TopKTriple, TuningTables,
};
