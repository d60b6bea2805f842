//! Hash table from (fingerprint, length) to a precomputed global aggregate.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::utility::{Aggregate, UtilitySpec};

/// Keys are already uniformly random residues, so a multiply-mix is enough.
#[derive(Default, Clone, Copy)]
pub struct FingerprintHasher(u64);

impl Hasher for FingerprintHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0.rotate_left(29) ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }

    #[inline]
    fn write_u32(&mut self, x: u32) {
        self.write_u64(x as u64);
    }
}

pub type FingerprintMap<V> = HashMap<(u64, u32), V, BuildHasherDefault<FingerprintHasher>>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableEntry {
    pub count: u64,
    pub acc: f64,
    /// Start of one occurrence, for verifying lookups against the text.
    pub witness: u32,
}

impl TableEntry {
    pub fn value(&self, spec: &UtilitySpec) -> Option<f64> {
        Aggregate { count: self.count, acc: self.acc }.finish(spec)
    }
}

#[derive(Clone, Debug, Default)]
pub struct UtilityTable {
    map: FingerprintMap<TableEntry>,
    max_len: u32,
}

impl UtilityTable {
    pub fn with_capacity(cap: usize) -> Self {
        UtilityTable { map: FingerprintMap::with_capacity_and_hasher(cap, Default::default()), max_len: 0 }
    }

    /// Returns false if the key was already present (the entry is left unchanged).
    pub fn insert(&mut self, fp: u64, len: u32, entry: TableEntry) -> bool {
        use std::collections::hash_map::Entry;
        match self.map.entry((fp, len)) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(entry);
                self.max_len = self.max_len.max(len);
                true
            }
        }
    }

    #[inline]
    pub fn get(&self, fp: u64, len: u32) -> Option<&TableEntry> {
        self.map.get(&(fp, len))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Longest stored substring; longer patterns can skip the lookup.
    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    /// Entries ordered by (length, fingerprint), independent of hash layout.
    pub fn sorted_entries(&self) -> Vec<((u64, u32), TableEntry)> {
        let mut v: Vec<_> = self.map.iter().map(|(k, e)| (*k, *e)).collect();
        v.sort_unstable_by_key(|&((fp, len), _)| (len, fp));
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u32), &TableEntry)> {
        self.map.iter()
    }

    /// Allocated buckets times (key + value + one control byte). The std map keeps buckets at
    /// most 7/8 full, so the bucket count is recovered from the reported capacity.
    pub fn size_bytes(&self) -> usize {
        let buckets = if self.map.capacity() == 0 { 0 } else { (self.map.capacity() * 8).div_ceil(7) };
        buckets * Self::SLOT_BYTES
    }

    const SLOT_BYTES: usize = std::mem::size_of::<((u64, u32), TableEntry)>() + 1;

    /// [`size_bytes`](Self::size_bytes) of a table created for `entries` entries, without
    /// allocating it. Mirrors the std map's bucket rounding.
    pub fn predicted_size_bytes(entries: usize) -> usize {
        let buckets = match entries {
            0 => 0,
            1..=3 => 4,
            4..=7 => 8,
            _ => (entries * 8 / 7).next_power_of_two(),
        };
        buckets * Self::SLOT_BYTES
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_size_matches_allocation() {
        for entries in (0..200).chain([1000, 4095, 65_536, 100_000]) {
            let t = UtilityTable::with_capacity(entries);
            assert_eq!(UtilityTable::predicted_size_bytes(entries), t.size_bytes(), "entries = {entries}");
        }
    }
}
