//! The USI index: a fingerprint table holding the global utilities of the top-K frequent
//! substrings, in front of a suffix-array fallback for every other pattern.

mod fallback;
mod serialize;
mod table;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fallback::FallbackIndex;
pub use serialize::{deserialize, read_index_file, serialize, write_index_file, FORMAT_VERSION, MAGIC};
pub use table::{FingerprintHasher, FingerprintMap, TableEntry, UtilityTable};

use crate::error::{Result, UsiError};
use crate::fingerprint::{Fingerprinter, DEFAULT_SEED};
use crate::par::{self, Execution};
use crate::text::WeightedText;
use crate::topk::{approximate_top_k, select_top_k, ApproxConfig, SampledEntry, TopKTriple};
use crate::utility::UtilitySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinerTag {
    Exact,
    Approx,
}

impl MinerTag {
    pub fn tag(self) -> u64 {
        match self {
            MinerTag::Exact => 0,
            MinerTag::Approx => 1,
        }
    }

    pub fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(MinerTag::Exact),
            1 => Some(MinerTag::Approx),
            _ => None,
        }
    }
}

/// Which miner feeds the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Miner {
    Exact,
    Approx(ApproxConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub k: usize,
    pub miner: Miner,
    pub seed: u64,
    /// Confirm table hits against the text (guards against fingerprint collisions with
    /// patterns that are not stored).
    pub verify: bool,
    pub exec: Execution,
}

impl BuildOptions {
    pub fn exact(k: usize) -> Self {
        BuildOptions { k, miner: Miner::Exact, seed: DEFAULT_SEED, verify: true, exec: Execution::default() }
    }

    pub fn approx(k: usize, config: ApproxConfig) -> Self {
        BuildOptions { miner: Miner::Approx(config), ..Self::exact(k) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UsiMeta {
    pub n: u64,
    /// Requested K.
    pub k: u64,
    /// Smallest frequency among stored substrings.
    pub tau_k: u64,
    pub l_k: u64,
    pub miner: MinerTag,
    /// Rounds used by the approximate miner (0 for exact).
    pub s: u64,
    pub seed: u64,
    pub spec: UtilitySpec,
    pub verify: bool,
}

/// Substrings chosen for the table, in either miner's output format.
#[derive(Clone, Copy, Debug)]
pub enum MinedSubstrings<'a> {
    Exact(&'a [TopKTriple]),
    Approx(&'a [SampledEntry]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryPath {
    Hit,
    Miss,
}

#[derive(Clone, Debug)]
pub struct UsiIndex {
    base: Arc<FallbackIndex>,
    table: UtilityTable,
    fpr: Fingerprinter,
    meta: UsiMeta,
}

impl UsiIndex {
    pub fn build(wt: &WeightedText, spec: UtilitySpec, opts: &BuildOptions) -> Result<Self> {
        let base = Arc::new(FallbackIndex::build(wt, spec)?);
        Self::build_on(base, opts)
    }

    /// Mines the top-K substrings of `base`'s text and fills the table.
    pub fn build_on(base: Arc<FallbackIndex>, opts: &BuildOptions) -> Result<Self> {
        let n = base.len();
        let fpr = Fingerprinter::new(opts.seed);
        match opts.miner {
            Miner::Exact => {
                let sel = select_top_k(base.suffix().sa(), base.suffix().lcp(), n, opts.k, opts.exec);
                let mut meta = Self::meta_for(&base, opts, MinerTag::Exact, 0);
                meta.tau_k = sel.tau_k as u64;
                meta.l_k = sel.l_k as u64;
                build_usi(base, MinedSubstrings::Exact(&sel.triples), fpr, meta, opts.exec)
            }
            Miner::Approx(config) => {
                let config = ApproxConfig { seed: opts.seed, exec: opts.exec, ..config };
                let s = config.rounds(n);
                let entries = approximate_top_k(base.text(), opts.k, &config);
                let meta = Self::meta_for(&base, opts, MinerTag::Approx, s as u64);
                build_usi(base, MinedSubstrings::Approx(&entries), fpr, meta, opts.exec)
            }
        }
    }

    fn meta_for(base: &FallbackIndex, opts: &BuildOptions, miner: MinerTag, s: u64) -> UsiMeta {
        UsiMeta {
            n: base.len() as u64,
            k: opts.k as u64,
            tau_k: 0,
            l_k: 0,
            miner,
            s,
            seed: opts.seed,
            spec: *base.spec(),
            verify: opts.verify,
        }
    }

    pub(crate) fn from_components(base: Arc<FallbackIndex>, table: UtilityTable, meta: UsiMeta) -> Self {
        UsiIndex { base, table, fpr: Fingerprinter::new(meta.seed), meta }
    }

    pub fn base(&self) -> &Arc<FallbackIndex> {
        &self.base
    }

    pub fn table(&self) -> &UtilityTable {
        &self.table
    }

    pub fn meta(&self) -> &UsiMeta {
        &self.meta
    }

    pub fn fingerprinter(&self) -> &Fingerprinter {
        &self.fpr
    }

    pub fn text(&self) -> &[u8] {
        self.base.text()
    }

    pub fn spec(&self) -> &UtilitySpec {
        self.base.spec()
    }

    pub fn set_verify(&mut self, verify: bool) {
        self.meta.verify = verify;
    }

    /// Global utility of `pattern`; `None` when it does not occur and the aggregate is undefined.
    pub fn query(&self, pattern: &[u8]) -> Result<Option<f64>> {
        self.query_traced(pattern).map(|(v, _)| v)
    }

    /// Like [`query`](Self::query), also reporting which path answered.
    pub fn query_traced(&self, pattern: &[u8]) -> Result<(Option<f64>, QueryPath)> {
        if pattern.is_empty() {
            return Err(UsiError::EmptyPattern);
        }
        let m = pattern.len();
        if m <= self.table.max_len() as usize {
            let fp = self.fpr.fingerprint(pattern);
            if let Some(e) = self.table.get(fp, m as u32) {
                let w = e.witness as usize;
                if !self.meta.verify || &self.base.text()[w..w + m] == pattern {
                    return Ok((e.value(self.spec()), QueryPath::Hit));
                }
            }
        }
        Ok((self.base.query(pattern)?, QueryPath::Miss))
    }

    pub fn query_batch(&self, patterns: &[Vec<u8>], exec: Execution) -> Vec<Result<Option<f64>>> {
        par::map(exec, patterns, |p| self.query(p))
    }

    /// Shared fallback components plus the table.
    pub fn size_bytes(&self) -> usize {
        self.base.size_bytes() + self.table.size_bytes()
    }
}

/// Fills the utility table for the given substrings, one pass over the text per length.
///
/// Occurrences of each length group are marked in a bit vector; a rolling fingerprint and the
/// prefix utilities are then evaluated at every marked window.
pub fn build_usi(
    base: Arc<FallbackIndex>,
    mined: MinedSubstrings<'_>,
    fpr: Fingerprinter,
    mut meta: UsiMeta,
    exec: Execution,
) -> Result<UsiIndex> {
    let n = base.len();
    let mut groups = occurrence_intervals(&base, mined)?;
    groups.sort_unstable_by_key(|g| (g.0, g.1));
    let mut bounds = Vec::new();
    let mut start = 0;
    for i in 1..=groups.len() {
        if i == groups.len() || groups[i].0 != groups[start].0 {
            bounds.push((start, i));
            start = i;
        }
    }
    let per_group = par::map_with(
        exec,
        &bounds,
        || vec![0u64; n.div_ceil(64)],
        |bits, &(a, b)| fill_group(&base, &fpr, &groups[a..b], bits),
    );
    let mut table = UtilityTable::with_capacity(groups.len());
    for entries in per_group {
        for (fp, len, entry) in entries? {
            table.insert(fp, len, entry);
        }
    }
    if let MinedSubstrings::Approx(_) = mined {
        meta.tau_k = table.iter().map(|(_, e)| e.count).min().unwrap_or(0);
        meta.l_k = bounds.len() as u64;
    }
    Ok(UsiIndex::from_components(base, table, meta))
}

/// `(length, lb, rb)` per mined substring.
fn occurrence_intervals(base: &FallbackIndex, mined: MinedSubstrings<'_>) -> Result<Vec<(u32, u32, u32)>> {
    let n = base.len();
    match mined {
        MinedSubstrings::Exact(triples) => triples
            .iter()
            .enumerate()
            .map(|(index, t)| {
                if t.lcp == 0 || t.lb > t.rb || t.rb as usize >= n {
                    return Err(UsiError::TripleOutOfRange { index, reason: format!("{t:?} for n = {n}") });
                }
                Ok((t.lcp, t.lb, t.rb))
            })
            .collect(),
        MinedSubstrings::Approx(entries) => entries
            .iter()
            .enumerate()
            .map(|(index, e)| {
                if e.len == 0 || e.j.checked_add(e.len).is_none_or(|end| end > n) {
                    return Err(UsiError::TripleOutOfRange { index, reason: format!("{e:?} for n = {n}") });
                }
                let (lb, rb) = base
                    .pattern_interval(e.substring(base.text()))
                    .expect("a substring of the text has an SA interval");
                Ok((e.len as u32, lb as u32, rb as u32))
            })
            .collect(),
    }
}

fn fill_group(
    base: &FallbackIndex,
    fpr: &Fingerprinter,
    group: &[(u32, u32, u32)],
    bits: &mut [u64],
) -> Result<Vec<(u64, u32, TableEntry)>> {
    let len = group[0].0;
    let l = len as usize;
    let n = base.len();
    let sa = base.suffix().sa();
    let result = (|| {
        let (mut lo, mut hi) = (usize::MAX, 0usize);
        for &(_, lb, rb) in group {
            for &p in &sa[lb as usize..=rb as usize] {
                let p = p as usize;
                if p + l > n {
                    return Err(UsiError::TripleOutOfRange {
                        index: lb as usize,
                        reason: format!("occurrence at {p} of length {l} exceeds n = {n}"),
                    });
                }
                let (w, b) = (p / 64, 1u64 << (p % 64));
                if bits[w] & b != 0 {
                    return Err(UsiError::DuplicateSubstring { position: p, len: l });
                }
                bits[w] |= b;
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        let spec = base.spec();
        let psw = base.psw();
        let mut local: FingerprintMap<TableEntry> =
            FingerprintMap::with_capacity_and_hasher(group.len(), Default::default());
        let text = base.text();
        for (i, fp) in fpr.windows(&text[lo..], l).take(hi - lo + 1) {
            let p = lo + i;
            if bits[p / 64] & (1u64 << (p % 64)) == 0 {
                continue;
            }
            let u = psw.local_utility_unchecked(p, l);
            let e = local.entry((fp, len)).or_insert_with(|| {
                let agg = spec.aggregate();
                TableEntry { count: agg.count, acc: agg.acc, witness: p as u32 }
            });
            let mut agg = crate::utility::Aggregate { count: e.count, acc: e.acc };
            agg.push(spec.global_op, u);
            e.count = agg.count;
            e.acc = agg.acc;
        }
        // Two stored substrings of this length sharing a fingerprint would merge here.
        if local.len() != group.len() {
            return Err(UsiError::FingerprintCollision { len: l });
        }
        Ok(local.into_iter().map(|((fp, len), e)| (fp, len, e)).collect())
    })();
    for &(_, lb, rb) in group {
        for &p in &sa[lb as usize..=rb as usize] {
            let p = p as usize;
            if p < n {
                bits[p / 64] &= !(1u64 << (p % 64));
            }
        }
    }
    result
}
