use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use usi_core::eval::workload::escape_pattern;
use usi_core::topk::SampledEntry;

use crate::args::OutputFormat;
use crate::CliResult;

/// Substrings in mined lists are cut to this many bytes.
pub const SUBSTRING_CAP: usize = 64;
pub const ELLIPSIS: &str = "\u{2026}";

/// Buffered file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Twelve decimals with trailing zeros dropped; `none` for an undefined aggregate.
pub fn format_utility(v: Option<f64>) -> String {
    let Some(v) = v else { return "none".to_string() };
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Escaped substring, truncated with an ellipsis past [`SUBSTRING_CAP`] bytes.
pub fn display_substring(bytes: &[u8]) -> String {
    if bytes.len() > SUBSTRING_CAP {
        format!("{}{ELLIPSIS}", escape_pattern(&bytes[..SUBSTRING_CAP]))
    } else {
        escape_pattern(bytes)
    }
}

#[derive(Serialize)]
struct MinedRow {
    witness_pos: usize,
    length: usize,
    est_freq: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    substring: Option<String>,
}

pub fn write_mined(
    sink: impl Write,
    text: &[u8],
    entries: &[SampledEntry],
    with_substring: bool,
    format: OutputFormat,
) -> CliResult<()> {
    let rows = entries.iter().map(|e| MinedRow {
        witness_pos: e.j,
        length: e.len,
        est_freq: e.f,
        substring: with_substring.then(|| display_substring(e.substring(text))),
    });
    match format {
        OutputFormat::Json => {
            let mut sink = sink;
            serde_json::to_writer(&mut sink, &rows.collect::<Vec<_>>())?;
            writeln!(sink)?;
            sink.flush()?;
        }
        OutputFormat::Csv | OutputFormat::Text => {
            let mut w = csv::Writer::from_writer(sink);
            if with_substring {
                w.write_record(["witness_pos", "length", "est_freq", "substring"])?;
            } else {
                w.write_record(["witness_pos", "length", "est_freq"])?;
            }
            for r in rows {
                let mut rec = vec![r.witness_pos.to_string(), r.length.to_string(), r.est_freq.to_string()];
                rec.extend(r.substring);
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct MinedInput {
    witness_pos: usize,
    length: usize,
    est_freq: u64,
}

/// Reads a list written by [`write_mined`] in CSV form; the substring column is ignored.
pub fn read_mined(path: &Path) -> CliResult<Vec<SampledEntry>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: MinedInput = row?;
        out.push(SampledEntry { j: row.witness_pos, len: row.length, f: row.est_freq });
    }
    Ok(out)
}

/// One JSON object, or a header line plus one CSV row.
pub fn write_record<T: Serialize>(sink: impl Write, record: &T, format: OutputFormat) -> CliResult<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.serialize(record)?;
            w.flush()?;
        }
        OutputFormat::Json | OutputFormat::Text => {
            let mut sink = sink;
            serde_json::to_writer(&mut sink, record)?;
            writeln!(sink)?;
            sink.flush()?;
        }
    }
    Ok(())
}
