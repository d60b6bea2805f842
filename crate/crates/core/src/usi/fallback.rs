//! Suffix array plus prefix utilities: answers any pattern in time proportional to its
//! occurrence count. Shared by the USI miss path and every baseline.

use crate::error::{Result, UsiError};
use crate::suffix::SuffixArrayIndex;
use crate::text::WeightedText;
use crate::utility::{PrefixUtilityArray, UtilitySpec};

#[derive(Clone, Debug)]
pub struct FallbackIndex {
    text: Vec<u8>,
    suffix: SuffixArrayIndex,
    psw: PrefixUtilityArray,
    spec: UtilitySpec,
}

impl FallbackIndex {
    pub fn build(wt: &WeightedText, spec: UtilitySpec) -> Result<Self> {
        let suffix = SuffixArrayIndex::build(wt.text())?;
        Self::from_parts(wt.text().to_vec(), suffix, PrefixUtilityArray::build(wt, &spec), spec)
    }

    pub fn from_parts(
        text: Vec<u8>,
        suffix: SuffixArrayIndex,
        psw: PrefixUtilityArray,
        spec: UtilitySpec,
    ) -> Result<Self> {
        if text.is_empty() {
            return Err(UsiError::EmptyText);
        }
        if suffix.len() != text.len() || psw.len() != text.len() {
            return Err(UsiError::Corrupt(format!(
                "component lengths disagree: text {}, suffix array {}, prefix utilities {}",
                text.len(),
                suffix.len(),
                psw.len()
            )));
        }
        if psw.local_op() != spec.local_op {
            return Err(UsiError::Corrupt("prefix utilities built for a different local operator".into()));
        }
        Ok(FallbackIndex { text, suffix, psw, spec })
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn suffix(&self) -> &SuffixArrayIndex {
        &self.suffix
    }

    pub fn psw(&self) -> &PrefixUtilityArray {
        &self.psw
    }

    pub fn spec(&self) -> &UtilitySpec {
        &self.spec
    }

    pub fn pattern_interval(&self, pattern: &[u8]) -> Option<(usize, usize)> {
        self.suffix.pattern_interval(&self.text, pattern)
    }

    /// Global utility by locating every occurrence and aggregating from the prefix array.
    pub fn query(&self, pattern: &[u8]) -> Result<Option<f64>> {
        if pattern.is_empty() {
            return Err(UsiError::EmptyPattern);
        }
        Ok(self.aggregate_interval(self.pattern_interval(pattern), pattern.len()))
    }

    pub(crate) fn aggregate_interval(&self, interval: Option<(usize, usize)>, m: usize) -> Option<f64> {
        let mut agg = self.spec.aggregate();
        if let Some((lb, rb)) = interval {
            for &p in &self.suffix.sa()[lb..=rb] {
                agg.push(self.spec.global_op, self.psw.local_utility_unchecked(p as usize, m));
            }
        }
        agg.finish(&self.spec)
    }

    /// Text, suffix array, LCP array and prefix utilities.
    pub fn size_bytes(&self) -> usize {
        self.text.len() + self.suffix.size_bytes() + self.psw.size_bytes()
    }

    /// [`size_bytes`](Self::size_bytes) for a text of length `n`: one byte of text, two `u32`
    /// suffix entries and one `f64` prefix utility per position.
    pub fn predicted_size_bytes(n: usize) -> usize {
        n * (1 + 2 * std::mem::size_of::<u32>() + std::mem::size_of::<f64>())
    }
}
