//! Weighted text: a byte string paired with one real-valued utility per position.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::error::{Result, UsiError};

/// Largest supported text; suffix structures store positions as `u32`.
pub const MAX_TEXT_LEN: usize = u32::MAX as usize - 1;

/// On-disk encoding of a weights file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightFormat {
    /// Little-endian IEEE-754 binary64, exactly `n` values.
    Binary,
    /// One decimal number per line.
    Text,
}

impl FromStr for WeightFormat {
    type Err = UsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "bin" | "f64" => Ok(WeightFormat::Binary),
            "text" | "txt" => Ok(WeightFormat::Text),
            other => Err(UsiError::InvalidParameter(format!("unknown weight format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightedText {
    text: Vec<u8>,
    weights: Vec<f64>,
    alphabet_size: usize,
}

impl WeightedText {
    pub fn new(text: Vec<u8>, weights: Vec<f64>) -> Result<Self> {
        if text.is_empty() {
            return Err(UsiError::EmptyText);
        }
        if text.len() > MAX_TEXT_LEN {
            return Err(UsiError::TextTooLong { len: text.len(), max: MAX_TEXT_LEN });
        }
        if text.len() != weights.len() {
            return Err(UsiError::LengthMismatch { text: text.len(), weights: weights.len() });
        }
        if let Some((position, &value)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite()) {
            return Err(UsiError::NonFiniteWeight { position, value });
        }
        let alphabet_size = alphabet_size(&text);
        Ok(WeightedText { text, weights, alphabet_size })
    }

    /// Every position gets the same utility.
    pub fn uniform(text: Vec<u8>, weight: f64) -> Result<Self> {
        let n = text.len();
        Self::new(text, vec![weight; n])
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Number of distinct byte values (σ).
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn into_parts(self) -> (Vec<u8>, Vec<f64>) {
        (self.text, self.weights)
    }
}

pub fn alphabet_size(text: &[u8]) -> usize {
    let mut seen = [false; 256];
    for &b in text {
        seen[b as usize] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

/// Reads a text verbatim and its weights in the given format, then validates the pair.
pub fn load_weighted_text<T: Read, W: Read>(
    mut text_source: T,
    weights_source: W,
    format: WeightFormat,
) -> Result<WeightedText> {
    let mut text = Vec::new();
    text_source.read_to_end(&mut text)?;
    let weights = read_weights(weights_source, format)?;
    WeightedText::new(text, weights)
}

pub fn read_weights<R: Read>(source: R, format: WeightFormat) -> Result<Vec<f64>> {
    match format {
        WeightFormat::Binary => {
            let mut bytes = Vec::new();
            BufReader::new(source).read_to_end(&mut bytes)?;
            if bytes.len() % 8 != 0 {
                return Err(UsiError::WeightParse {
                    line: 0,
                    reason: format!("binary weights file has {} bytes, not a multiple of 8", bytes.len()),
                });
            }
            Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
        }
        WeightFormat::Text => {
            let mut weights = Vec::new();
            for (i, line) in BufReader::new(source).lines().enumerate() {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                let value =
                    trimmed.parse::<f64>().map_err(|e| UsiError::WeightParse { line: i + 1, reason: e.to_string() })?;
                weights.push(value);
            }
            Ok(weights)
        }
    }
}

pub fn write_weights<W: Write>(sink: W, weights: &[f64], format: WeightFormat) -> Result<()> {
    let mut sink = std::io::BufWriter::new(sink);
    match format {
        WeightFormat::Binary => {
            for w in weights {
                sink.write_all(&w.to_le_bytes())?;
            }
        }
        WeightFormat::Text => {
            for w in weights {
                writeln!(sink, "{w}")?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}
