//! Query engines: USI and the four caching baselines, behind one trait.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::heap::IndexedMinHeap;
use super::sketch::CountMinSketch;
use crate::error::{Result, UsiError};
use crate::fingerprint::{Fingerprinter, DEFAULT_SEED};
use crate::usi::{FallbackIndex, FingerprintMap, UsiIndex};

/// Anything that answers global-utility queries over one text.
pub trait QueryEngine {
    fn name(&self) -> &'static str;
    fn query(&mut self, pattern: &[u8]) -> Result<Option<f64>>;
    fn index_size_bytes(&self) -> usize;
    fn text(&self) -> &[u8];
    /// Forgets any state learned from past queries. Stateless engines do nothing.
    fn reset(&mut self) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Usi,
    Bsl1,
    Bsl2,
    Bsl3,
    Bsl4,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] =
        [EngineKind::Usi, EngineKind::Bsl1, EngineKind::Bsl2, EngineKind::Bsl3, EngineKind::Bsl4];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Usi => "usi",
            EngineKind::Bsl1 => "bsl1",
            EngineKind::Bsl2 => "bsl2",
            EngineKind::Bsl3 => "bsl3",
            EngineKind::Bsl4 => "bsl4",
        }
    }

    /// A baseline with cache capacity `k`; `None` for USI, which is built separately.
    pub fn baseline(self, base: Arc<FallbackIndex>, k: usize, seed: u64) -> Option<Box<dyn QueryEngine + Send>> {
        Some(match self {
            EngineKind::Usi => return None,
            EngineKind::Bsl1 => Box::new(Bsl1::new(base)),
            EngineKind::Bsl2 => Box::new(CachedEngine::new(base, CachePolicy::Lru, k, seed)),
            EngineKind::Bsl3 => Box::new(CachedEngine::new(base, CachePolicy::LeastFrequentlyQueried, k, seed)),
            EngineKind::Bsl4 => {
                Box::new(Bsl4::new(base, k, CountMinSketch::DEFAULT_DEPTH, CountMinSketch::DEFAULT_WIDTH, seed))
            }
        })
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        EngineKind::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown engine '{s}' (expected usi, bsl1, bsl2, bsl3 or bsl4)"))
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl QueryEngine for UsiIndex {
    fn name(&self) -> &'static str {
        "usi"
    }

    fn query(&mut self, pattern: &[u8]) -> Result<Option<f64>> {
        UsiIndex::query(self, pattern)
    }

    fn index_size_bytes(&self) -> usize {
        self.size_bytes()
    }

    fn text(&self) -> &[u8] {
        UsiIndex::text(self)
    }
}

/// Suffix array and prefix utilities only.
pub struct Bsl1 {
    base: Arc<FallbackIndex>,
}

impl Bsl1 {
    pub fn new(base: Arc<FallbackIndex>) -> Self {
        Bsl1 { base }
    }
}

impl QueryEngine for Bsl1 {
    fn name(&self) -> &'static str {
        "bsl1"
    }

    fn query(&mut self, pattern: &[u8]) -> Result<Option<f64>> {
        self.base.query(pattern)
    }

    fn index_size_bytes(&self) -> usize {
        self.base.size_bytes()
    }

    fn text(&self) -> &[u8] {
        self.base.text()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CachePolicy {
    /// Evict the least recently queried pattern.
    Lru,
    /// Evict the pattern queried the fewest times (oldest first among ties).
    LeastFrequentlyQueried,
}

type Key = (u64, u32);

struct Cached {
    pattern: Box<[u8]>,
    value: Option<f64>,
}

fn cached_size(values: &FingerprintMap<Cached>) -> usize {
    let slot = std::mem::size_of::<(Key, Cached)>() + 1;
    values.capacity() * slot + values.values().map(|c| c.pattern.len()).sum::<usize>()
}

/// Up to K cached utilities keyed by (fingerprint, length); hits are confirmed on the bytes.
pub struct QueryCache {
    policy: CachePolicy,
    capacity: usize,
    order: IndexedMinHeap<Key, (u64, u64)>,
    values: FingerprintMap<Cached>,
    /// Query counts of every pattern seen so far (least-frequently-queried policy only).
    seen: FingerprintMap<u64>,
    clock: u64,
}

impl QueryCache {
    pub fn new(policy: CachePolicy, capacity: usize) -> Self {
        QueryCache {
            policy,
            capacity,
            order: IndexedMinHeap::with_capacity(capacity.min(1 << 20)),
            values: FingerprintMap::default(),
            seen: FingerprintMap::default(),
            clock: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn contains(&self, key: Key, pattern: &[u8]) -> bool {
        self.values.get(&key).is_some_and(|c| &*c.pattern == pattern)
    }

    fn priority(&mut self, key: Key) -> (u64, u64) {
        self.clock += 1;
        match self.policy {
            CachePolicy::Lru => (self.clock, 0),
            CachePolicy::LeastFrequentlyQueried => {
                let c = self.seen.entry(key).or_default();
                *c += 1;
                (*c, self.clock)
            }
        }
    }

    /// Looks `pattern` up, recording the access; on a miss computes and caches the answer.
    pub fn query(&mut self, base: &FallbackIndex, key: Key, pattern: &[u8]) -> Result<Option<f64>> {
        let prio = self.priority(key);
        if let Some(c) = self.values.get(&key) {
            if &*c.pattern == pattern {
                let v = c.value;
                self.order.set_priority(&key, prio);
                return Ok(v);
            }
            // Another pattern owns this key; answer without caching.
            return base.query(pattern);
        }
        let value = base.query(pattern)?;
        if self.capacity == 0 {
            return Ok(value);
        }
        if self.order.len() >= self.capacity {
            if let Some((victim, _)) = self.order.pop() {
                self.values.remove(&victim);
            }
        }
        self.order.push(key, prio);
        self.values.insert(key, Cached { pattern: pattern.into(), value });
        Ok(value)
    }

    pub fn clear(&mut self) {
        *self = QueryCache::new(self.policy, self.capacity);
    }

    pub fn size_bytes(&self) -> usize {
        let seen = self.seen.capacity() * (std::mem::size_of::<(Key, u64)>() + 1);
        self.order.size_bytes() + cached_size(&self.values) + seen
    }
}

/// BSL2 (LRU cache) and BSL3 (least-frequently-queried cache).
pub struct CachedEngine {
    base: Arc<FallbackIndex>,
    fpr: Fingerprinter,
    cache: QueryCache,
}

impl CachedEngine {
    pub fn new(base: Arc<FallbackIndex>, policy: CachePolicy, k: usize, seed: u64) -> Self {
        CachedEngine { base, fpr: Fingerprinter::new(seed), cache: QueryCache::new(policy, k) }
    }

    pub fn cache(&self) -> &QueryCache {
        &self.cache
    }
}

impl QueryEngine for CachedEngine {
    fn name(&self) -> &'static str {
        match self.cache.policy {
            CachePolicy::Lru => "bsl2",
            CachePolicy::LeastFrequentlyQueried => "bsl3",
        }
    }

    fn query(&mut self, pattern: &[u8]) -> Result<Option<f64>> {
        if pattern.is_empty() {
            return Err(UsiError::EmptyPattern);
        }
        let key = (self.fpr.fingerprint(pattern), pattern.len() as u32);
        self.cache.query(&self.base, key, pattern)
    }

    fn reset(&mut self) {
        self.cache.clear();
    }

    fn index_size_bytes(&self) -> usize {
        self.base.size_bytes() + self.cache.size_bytes()
    }

    fn text(&self) -> &[u8] {
        self.base.text()
    }
}

/// Like BSL3, but query counts live in a count-min sketch; the cache holds the patterns with
/// the highest estimated counts.
pub struct Bsl4 {
    base: Arc<FallbackIndex>,
    fpr: Fingerprinter,
    sketch: CountMinSketch,
    capacity: usize,
    top: IndexedMinHeap<Key, (u64, u64)>,
    values: FingerprintMap<Cached>,
    clock: u64,
}

impl Bsl4 {
    pub fn new(base: Arc<FallbackIndex>, k: usize, depth: usize, width: usize, seed: u64) -> Self {
        Bsl4 {
            base,
            fpr: Fingerprinter::new(seed),
            sketch: CountMinSketch::new(depth, width, seed ^ DEFAULT_SEED),
            capacity: k,
            top: IndexedMinHeap::with_capacity(k.min(1 << 20)),
            values: FingerprintMap::default(),
            clock: 0,
        }
    }

    pub fn in_top_set(&self, pattern: &[u8]) -> bool {
        let key = (self.fpr.fingerprint(pattern), pattern.len() as u32);
        self.values.get(&key).is_some_and(|c| &*c.pattern == pattern)
    }

    pub fn top_set_len(&self) -> usize {
        self.top.len()
    }
}

impl QueryEngine for Bsl4 {
    fn name(&self) -> &'static str {
        "bsl4"
    }

    fn query(&mut self, pattern: &[u8]) -> Result<Option<f64>> {
        if pattern.is_empty() {
            return Err(UsiError::EmptyPattern);
        }
        let key = (self.fpr.fingerprint(pattern), pattern.len() as u32);
        let est = self.sketch.add(key.0 ^ (key.1 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15), 1);
        self.clock += 1;
        let prio = (est, self.clock);
        if let Some(c) = self.values.get(&key) {
            if &*c.pattern == pattern {
                let v = c.value;
                self.top.set_priority(&key, prio);
                return Ok(v);
            }
            return self.base.query(pattern);
        }
        let value = self.base.query(pattern)?;
        let admit = self.capacity > 0
            && (self.top.len() < self.capacity || self.top.peek().is_some_and(|(_, (min_est, _))| est > min_est));
        if admit {
            if self.top.len() >= self.capacity {
                if let Some((victim, _)) = self.top.pop() {
                    self.values.remove(&victim);
                }
            }
            self.top.push(key, prio);
            self.values.insert(key, Cached { pattern: pattern.into(), value });
        }
        Ok(value)
    }

    fn index_size_bytes(&self) -> usize {
        self.base.size_bytes() + self.sketch.size_bytes() + self.top.size_bytes() + cached_size(&self.values)
    }

    fn text(&self) -> &[u8] {
        self.base.text()
    }

    fn reset(&mut self) {
        self.sketch.clear();
        self.top = IndexedMinHeap::with_capacity(self.capacity.min(1 << 20));
        self.values.clear();
        self.clock = 0;
    }
}
