use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum UsiError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("text is empty")]
    EmptyText,

    #[error("text has {text} bytes but {weights} weights were supplied")]
    LengthMismatch { text: usize, weights: usize },

    #[error("weight at position {position} is not finite ({value})")]
    NonFiniteWeight { position: usize, value: f64 },

    #[error("could not parse weight on line {line}: {reason}")]
    WeightParse { line: usize, reason: String },

    #[error("texts longer than {max} bytes are not supported (got {len})")]
    TextTooLong { len: usize, max: usize },

    #[error("fragment [{start}, {start}+{len}) is outside a text of length {n}")]
    FragmentOutOfRange { start: usize, len: usize, n: usize },

    #[error("pattern must not be empty")]
    EmptyPattern,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("K = {k} exceeds the {total} distinct substrings of the text")]
    KTooLarge { k: u64, total: u64 },

    #[error("mined substring #{index} is out of range: {reason}")]
    TripleOutOfRange { index: usize, reason: String },

    #[error("substring of length {len} at position {position} was supplied more than once")]
    DuplicateSubstring { position: usize, len: usize },

    #[error("fingerprint collision among stored substrings of length {len}")]
    FingerprintCollision { len: usize },

    #[error("bad magic bytes: not a {expected} file")]
    BadMagic { expected: &'static str },

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },

    #[error("file is truncated")]
    Truncated,

    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    ChecksumMismatch { stored: u64, computed: u64 },

    #[error("corrupt file: {0}")]
    Corrupt(String),

    #[error("engine '{engine}' and workload '{workload}' were built over different texts")]
    TextMismatch { engine: String, workload: String },
}

impl UsiError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, UsiError::FingerprintCollision { .. })
    }
}

pub type Result<T> = std::result::Result<T, UsiError>;
