//! Binary index format.
//!
//! `USI1` magic, format version, metadata, text, SA, LCP, PSW, table entries, then an xxh3-64
//! checksum of everything before it. Integers are little-endian u64, reals IEEE-754 binary64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use xxhash_rust::xxh3::Xxh3;

use super::{FallbackIndex, MinerTag, TableEntry, UsiIndex, UsiMeta, UtilityTable};
use crate::error::{Result, UsiError};
use crate::suffix::SuffixArrayIndex;
use crate::utility::{GlobalOp, LocalOp, PrefixUtilityArray, UtilitySpec};

pub const MAGIC: &[u8; 4] = b"USI1";
pub const FORMAT_VERSION: u64 = 1;

const CHUNK: usize = 8192;

struct HashingWriter<W> {
    inner: W,
    hasher: Xxh3,
}

impl<W: Write> HashingWriter<W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.hasher.update(b);
        self.inner.write_all(b)?;
        Ok(())
    }

    fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    fn u64s(&mut self, values: impl ExactSizeIterator<Item = u64>) -> Result<()> {
        let mut buf = Vec::with_capacity(CHUNK * 8);
        for v in values {
            buf.extend_from_slice(&v.to_le_bytes());
            if buf.len() == CHUNK * 8 {
                self.bytes(&buf)?;
                buf.clear();
            }
        }
        self.bytes(&buf)
    }
}

struct HashingReader<R> {
    inner: R,
    hasher: Xxh3,
}

impl<R: Read> HashingReader<R> {
    fn bytes(&mut self, out: &mut [u8]) -> Result<()> {
        self.inner.read_exact(out).map_err(eof_as_truncated)?;
        self.hasher.update(out);
        Ok(())
    }

    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.bytes(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    /// Reads `count` u64 values, converting each with `f`.
    fn u64s<T>(&mut self, count: usize, mut f: impl FnMut(u64) -> Result<T>) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(count);
        let mut buf = vec![0u8; CHUNK * 8];
        let mut left = count;
        while left > 0 {
            let take = left.min(CHUNK);
            self.bytes(&mut buf[..take * 8])?;
            for c in buf[..take * 8].chunks_exact(8) {
                out.push(f(u64::from_le_bytes(c.try_into().unwrap()))?);
            }
            left -= take;
        }
        Ok(out)
    }
}

fn eof_as_truncated(e: std::io::Error) -> UsiError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        UsiError::Truncated
    } else {
        UsiError::Io(e)
    }
}

pub fn serialize<W: Write>(index: &UsiIndex, sink: W) -> Result<()> {
    let mut w = HashingWriter { inner: sink, hasher: Xxh3::new() };
    let meta = index.meta();
    let base = index.base();
    w.bytes(MAGIC)?;
    w.u64(FORMAT_VERSION)?;
    for v in [
        meta.n,
        meta.k,
        meta.tau_k,
        meta.l_k,
        meta.miner.tag(),
        meta.s,
        meta.seed,
        meta.spec.local_op.tag(),
        meta.spec.global_op.tag(),
        meta.verify as u64,
    ] {
        w.u64(v)?;
    }
    w.bytes(base.text())?;
    w.u64s(base.suffix().sa().iter().map(|&x| x as u64))?;
    w.u64s(base.suffix().lcp().iter().map(|&x| x as u64))?;
    w.u64s(base.psw().as_slice().iter().map(|x| x.to_bits()))?;
    let entries = index.table().sorted_entries();
    w.u64(entries.len() as u64)?;
    for ((fp, len), e) in entries {
        w.u64(fp)?;
        w.u64(len as u64)?;
        w.u64(e.count)?;
        w.f64(e.acc)?;
        w.u64(e.witness as u64)?;
    }
    let checksum = w.hasher.digest();
    w.inner.write_all(&checksum.to_le_bytes())?;
    w.inner.flush()?;
    Ok(())
}

pub fn deserialize<R: Read>(source: R) -> Result<UsiIndex> {
    let mut r = HashingReader { inner: source, hasher: Xxh3::new() };
    let mut magic = [0u8; 4];
    r.bytes(&mut magic)?;
    if &magic != MAGIC {
        return Err(UsiError::BadMagic { expected: "USI1" });
    }
    let version = r.u64()?;
    if version != FORMAT_VERSION {
        return Err(UsiError::UnsupportedVersion { found: version, expected: FORMAT_VERSION });
    }
    let mut m = [0u64; 10];
    for v in m.iter_mut() {
        *v = r.u64()?;
    }
    let [n, k, tau_k, l_k, miner, s, seed, local, global, verify] = m;
    let corrupt = |what: &str| UsiError::Corrupt(what.to_string());
    let miner = MinerTag::from_tag(miner).ok_or_else(|| corrupt("unknown miner tag"))?;
    let local_op = LocalOp::from_tag(local).ok_or_else(|| corrupt("unknown local operator tag"))?;
    let global_op = GlobalOp::from_tag(global).ok_or_else(|| corrupt("unknown global operator tag"))?;
    if n == 0 || n > crate::text::MAX_TEXT_LEN as u64 {
        return Err(corrupt("text length out of range"));
    }
    let n = n as usize;
    let spec = UtilitySpec::new(local_op, global_op);
    let meta = UsiMeta { n: n as u64, k, tau_k, l_k, miner, s, seed, spec, verify: verify != 0 };

    let mut text = vec![0u8; n];
    r.bytes(&mut text)?;
    let position = |v: u64| {
        if v < n as u64 {
            Ok(v as u32)
        } else {
            Err(UsiError::Corrupt(format!("array value {v} out of range for n = {n}")))
        }
    };
    let sa = r.u64s(n, position)?;
    let lcp = r.u64s(n, position)?;
    let psw = r.u64s(n, |b| Ok(f64::from_bits(b)))?;
    let count = r.u64()?;
    if count > n as u64 * (n as u64 + 1) / 2 {
        return Err(corrupt("table entry count exceeds the number of substrings"));
    }
    let mut table = UtilityTable::with_capacity(count as usize);
    for _ in 0..count {
        let fp = r.u64()?;
        let len = r.u64()?;
        let entry_count = r.u64()?;
        let acc = r.f64()?;
        let witness = r.u64()?;
        if len == 0 || witness.checked_add(len).is_none_or(|end| end > n as u64) {
            return Err(corrupt("table entry outside the text"));
        }
        if !table.insert(fp, len as u32, TableEntry { count: entry_count, acc, witness: witness as u32 }) {
            return Err(corrupt("duplicate table key"));
        }
    }
    let computed = r.hasher.digest();
    let mut stored = [0u8; 8];
    r.inner.read_exact(&mut stored).map_err(eof_as_truncated)?;
    let stored = u64::from_le_bytes(stored);
    if stored != computed {
        return Err(UsiError::ChecksumMismatch { stored, computed });
    }
    let suffix = SuffixArrayIndex::from_parts(sa, lcp)?;
    let base = FallbackIndex::from_parts(text, suffix, PrefixUtilityArray::from_raw(psw, local_op), spec)?;
    Ok(UsiIndex::from_components(Arc::new(base), table, meta))
}

pub fn write_index_file(index: &UsiIndex, path: &Path) -> Result<()> {
    serialize(index, BufWriter::with_capacity(1 << 20, File::create(path)?))
}

pub fn read_index_file(path: &Path) -> Result<UsiIndex> {
    deserialize(BufReader::with_capacity(1 << 20, File::open(path)?))
}
