//! Suffix array, LCP array and the structures derived from them.
//!
//! The suffix array together with the LCP array stands in for a suffix tree: every explicit
//! internal node of the suffix tree is an LCP interval, and the bottom-up interval traversal
//! visits them in the same order a post-order tree walk would.

mod cache;
mod intervals;
mod sais;

use std::cmp::Ordering;

pub use cache::{cache_path, load_cached, store_cached, text_content_hash};
pub use intervals::{for_each_lcp_interval, lcp_intervals, LcpInterval};
pub use sais::{suffix_array, suffix_array_naive};

use crate::error::{Result, UsiError};
use crate::text::MAX_TEXT_LEN;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixArrayIndex {
    sa: Vec<u32>,
    lcp: Vec<u32>,
}

impl SuffixArrayIndex {
    pub fn build(text: &[u8]) -> Result<Self> {
        if text.is_empty() {
            return Err(UsiError::EmptyText);
        }
        if text.len() > MAX_TEXT_LEN {
            return Err(UsiError::TextTooLong { len: text.len(), max: MAX_TEXT_LEN });
        }
        let sa = suffix_array(text);
        let lcp = build_lcp(text, &sa);
        Ok(SuffixArrayIndex { sa, lcp })
    }

    /// Trusts the caller that `sa`/`lcp` belong together; lengths are checked.
    pub fn from_parts(sa: Vec<u32>, lcp: Vec<u32>) -> Result<Self> {
        if sa.len() != lcp.len() {
            return Err(UsiError::Corrupt(format!(
                "suffix array has {} entries but LCP array has {}",
                sa.len(),
                lcp.len()
            )));
        }
        Ok(SuffixArrayIndex { sa, lcp })
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn lcp(&self) -> &[u32] {
        &self.lcp
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    pub fn size_bytes(&self) -> usize {
        (self.sa.len() + self.lcp.len()) * std::mem::size_of::<u32>()
    }

    /// SA range `[lb, rb]` of the suffixes prefixed by `pattern`.
    pub fn pattern_interval(&self, text: &[u8], pattern: &[u8]) -> Option<(usize, usize)> {
        pattern_interval(text, &self.sa, pattern)
    }

    /// Occurrence count of `pattern`.
    pub fn count(&self, text: &[u8], pattern: &[u8]) -> usize {
        self.pattern_interval(text, pattern).map_or(0, |(lb, rb)| rb - lb + 1)
    }
}

/// Kasai et al.: `lcp[0] = 0`, `lcp[j]` = LCP of suffixes `sa[j-1]` and `sa[j]`.
pub fn build_lcp(text: &[u8], sa: &[u32]) -> Vec<u32> {
    let n = sa.len();
    let mut rank = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

#[inline]
fn prefix_cmp(text: &[u8], start: usize, pattern: &[u8]) -> Ordering {
    let end = (start + pattern.len()).min(text.len());
    text[start..end].cmp(pattern)
}

/// Binary search over any array of suffix start positions in lexicographic order.
pub fn pattern_interval(text: &[u8], sa: &[u32], pattern: &[u8]) -> Option<(usize, usize)> {
    if pattern.is_empty() {
        return None;
    }
    let lb = sa.partition_point(|&s| prefix_cmp(text, s as usize, pattern) == Ordering::Less);
    let rb = lb + sa[lb..].partition_point(|&s| prefix_cmp(text, s as usize, pattern) == Ordering::Equal);
    if lb == rb {
        None
    } else {
        Some((lb, rb - 1))
    }
}
