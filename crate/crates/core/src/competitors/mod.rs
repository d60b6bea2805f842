//! Baselines for querying (BSL1–4) and for mining (SubstringHK, Top-K Trie).

mod baselines;
mod heap;
mod shk;
mod sketch;
mod trie;

pub use baselines::{Bsl1, Bsl4, CachePolicy, CachedEngine, EngineKind, QueryCache, QueryEngine};
pub use heap::IndexedMinHeap;
pub use shk::{substring_hk_mine, ShkParams};
pub use sketch::{CountMinSketch, HeavyKeeper};
pub use trie::topk_trie_mine;
