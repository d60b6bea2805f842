//! On-disk cache of the suffix and LCP arrays, keyed by a hash of the text.
//!
//! Layout (little-endian): magic `USISA1\0\0`, version, text hash, n, then `sa` and `lcp` as
//! `n` 64-bit integers each. A cache file that does not match the text is ignored.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::SuffixArrayIndex;
use crate::error::{Result, UsiError};

const MAGIC: &[u8; 8] = b"USISA1\0\0";
const VERSION: u64 = 1;

pub fn text_content_hash(text: &[u8]) -> u64 {
    xxhash_rust::xxh3::xxh3_64(text)
}

pub fn cache_path(dir: &Path, text: &[u8]) -> PathBuf {
    dir.join(format!("{:016x}-{}.sacache", text_content_hash(text), text.len()))
}

pub fn store_cached(dir: &Path, text: &[u8], index: &SuffixArrayIndex) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, text);
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::with_capacity(1 << 20, File::create(&tmp)?);
        w.write_all(MAGIC)?;
        for v in [VERSION, text_content_hash(text), text.len() as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        for &x in index.sa().iter().chain(index.lcp()) {
            w.write_all(&(x as u64).to_le_bytes())?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

/// `Ok(None)` when no usable cache entry exists for this text.
pub fn load_cached(dir: &Path, text: &[u8]) -> Result<Option<SuffixArrayIndex>> {
    let path = cache_path(dir, text);
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = BufReader::with_capacity(1 << 20, file);
    let mut magic = [0u8; 8];
    if r.read_exact(&mut magic).is_err() || &magic != MAGIC {
        return Ok(None);
    }
    let mut header = [0u64; 3];
    for h in header.iter_mut() {
        *h = read_u64(&mut r)?;
    }
    let n = text.len();
    if header != [VERSION, text_content_hash(text), n as u64] {
        return Ok(None);
    }
    let read_array = |r: &mut BufReader<File>| -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(n);
        let mut buf = vec![0u8; 8 * 8192];
        let mut left = n;
        while left > 0 {
            let take = left.min(8192);
            r.read_exact(&mut buf[..take * 8]).map_err(|_| UsiError::Truncated)?;
            for chunk in buf[..take * 8].chunks_exact(8) {
                let v = u64::from_le_bytes(chunk.try_into().unwrap());
                if v >= n as u64 {
                    return Err(UsiError::Corrupt(format!("cache value {v} out of range")));
                }
                out.push(v as u32);
            }
            left -= take;
        }
        Ok(out)
    };
    let sa = read_array(&mut r)?;
    let lcp = read_array(&mut r)?;
    SuffixArrayIndex::from_parts(sa, lcp).map(Some)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| UsiError::Truncated)?;
    Ok(u64::from_le_bytes(b))
}

impl SuffixArrayIndex {
    /// Loads the arrays from `dir` if cached, otherwise builds and stores them.
    pub fn build_cached(text: &[u8], dir: &Path) -> Result<Self> {
        if let Some(idx) = load_cached(dir, text)? {
            return Ok(idx);
        }
        let idx = SuffixArrayIndex::build(text)?;
        store_cached(dir, text, &idx)?;
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let text = b"mississippi";
        let idx = SuffixArrayIndex::build(text).unwrap();
        assert!(load_cached(dir.path(), text).unwrap().is_none());
        store_cached(dir.path(), text, &idx).unwrap();
        assert_eq!(load_cached(dir.path(), text).unwrap(), Some(idx.clone()));
        assert!(load_cached(dir.path(), b"mississippa").unwrap().is_none());
        assert_eq!(SuffixArrayIndex::build_cached(text, dir.path()).unwrap(), idx);
    }
}
