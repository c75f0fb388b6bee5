//! Binary table cache.
//!
//! Layout (little-endian): magic `APVARTAB`, `u16` version, `u64` n_max,
//! then `n_max + 1` entries (index 0 included) of each array in turn:
//! τ as `u32`, μ as `i8`, φ as `u64`, Ramanujan τ as `i128` written low
//! 64 bits then high 64 bits. A trailing `u64` holds the wrapping sum of all
//! preceding bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::arith::ArithTables;
use crate::error::{Error, Result};
use crate::forms::HeckeTable;

pub const MAGIC: &[u8; 8] = b"APVARTAB";
pub const VERSION: u16 = 1;
/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "APVAR_CACHE_DIR";

fn checksum(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0u64, |acc, &b| acc.wrapping_add(b as u64))
}

/// Serializes both tables; they must share `n_max`.
pub fn encode(arith: &ArithTables, hecke: &HeckeTable) -> Result<Vec<u8>> {
    if arith.n_max != hecke.n_max {
        return Err(Error::Cache(format!("n_max mismatch: arithmetic {} vs Hecke {}", arith.n_max, hecke.n_max)));
    }
    let len = arith.n_max + 1;
    let mut out = Vec::with_capacity(26 + len * 29);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(arith.n_max as u64).to_le_bytes());
    for &t in &arith.tau {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for &m in &arith.mu {
        out.extend_from_slice(&m.to_le_bytes());
    }
    for &p in &arith.phi {
        out.extend_from_slice(&p.to_le_bytes());
    }
    for &r in &hecke.tau_exact {
        let bits = r as u128;
        out.extend_from_slice(&(bits as u64).to_le_bytes());
        out.extend_from_slice(&((bits >> 64) as u64).to_le_bytes());
    }
    let sum = checksum(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let s = self.bytes.get(self.pos..end).ok_or_else(|| Error::Cache("truncated file".into()))?;
        self.pos = end;
        Ok(s.try_into().expect("slice length matches"))
    }
}

/// Parses and verifies a cache image. The sieve part is recomputed and must
/// agree with the stored arrays.
pub fn decode(bytes: &[u8]) -> Result<(ArithTables, HeckeTable)> {
    if bytes.len() < 26 {
        return Err(Error::Cache("file shorter than header".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    if checksum(body) != stored {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if &r.take::<8>()? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u16::from_le_bytes(r.take()?);
    if version != VERSION {
        return Err(Error::Cache(format!("version {version}, expected {VERSION}")));
    }
    let n_max = u64::from_le_bytes(r.take()?) as usize;
    let len = n_max.checked_add(1).ok_or_else(|| Error::Cache("bad n_max".into()))?;
    if body.len() != 18 + len * (4 + 1 + 8 + 16) {
        return Err(Error::Cache(format!("length {} inconsistent with n_max {n_max}", bytes.len())));
    }
    let tau: Vec<u32> = (0..len).map(|_| r.take().map(u32::from_le_bytes)).collect::<Result<_>>()?;
    let mu: Vec<i8> = (0..len).map(|_| r.take().map(i8::from_le_bytes)).collect::<Result<_>>()?;
    let phi: Vec<u64> = (0..len).map(|_| r.take().map(u64::from_le_bytes)).collect::<Result<_>>()?;
    let mut rt = Vec::with_capacity(len);
    for _ in 0..len {
        let lo = u64::from_le_bytes(r.take()?) as u128;
        let hi = u64::from_le_bytes(r.take()?) as u128;
        rt.push((lo | (hi << 64)) as i128);
    }
    let arith = ArithTables::build(n_max)?;
    if arith.tau != tau || arith.mu != mu || arith.phi != phi {
        return Err(Error::Cache("stored sieve arrays disagree with a fresh sieve".into()));
    }
    Ok((arith, HeckeTable::from_exact(rt)?))
}

/// Cache directory from the environment, if set.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)
}

pub fn cache_path(dir: &Path, n_max: usize) -> PathBuf {
    dir.join(format!("apvar-tables-{n_max}.bin"))
}

pub fn write(path: &Path, arith: &ArithTables, hecke: &HeckeTable) -> Result<()> {
    let bytes = encode(arith, hecke)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes).map_err(|e| Error::Cache(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<(ArithTables, HeckeTable)> {
    let bytes = fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}

/// Loads `apvar-tables-{n_max}.bin` from `dir` when present and valid,
/// otherwise builds the tables and writes them. Returns whether the cache hit.
pub fn load_or_build(dir: Option<&Path>, n_max: usize) -> Result<(ArithTables, HeckeTable, bool)> {
    if let Some(d) = dir {
        let p = cache_path(d, n_max);
        if p.exists() {
            if let Ok((a, h)) = read(&p) {
                return Ok((a, h, true));
            }
        }
    }
    let arith = ArithTables::build(n_max)?;
    let hecke = HeckeTable::build(n_max)?;
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| Error::Cache(format!("{}: {e}", d.display())))?;
        write(&cache_path(d, n_max), &arith, &hecke)?;
    }
    Ok((arith, hecke, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let a = ArithTables::build(300).unwrap();
        let h = HeckeTable::build(300).unwrap();
        let bytes = encode(&a, &h).unwrap();
        assert_eq!(&bytes[..8], MAGIC);
        let (a2, h2) = decode(&bytes).unwrap();
        assert_eq!(a2, a);
        assert_eq!(h2.tau_exact, h.tau_exact);
        assert_eq!(encode(&a2, &h2).unwrap(), bytes);
        let mut bad = bytes.clone();
        bad[100] ^= 1;
        assert!(matches!(decode(&bad), Err(Error::Cache(_))));
        let mut old = bytes.clone();
        old[8] = 9;
        let n = old.len();
        let sum = checksum(&old[..n - 8]);
        old[n - 8..].copy_from_slice(&sum.to_le_bytes());
        assert!(decode(&old).unwrap_err().to_string().contains("version"));
    }
}
