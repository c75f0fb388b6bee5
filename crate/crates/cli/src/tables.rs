//! Table sizing and loading.

use std::path::{Path, PathBuf};

use apvar_core::arith::ARITH_CAP;
use apvar_core::cache;
use apvar_core::forms::HECKE_CAP;
use apvar_core::{ArithTables, Error, HeckeTable, Result};

/// Smallest value of the form `{1, 2, 5} · 10^k` that is at least `n`,
/// so nearby requests share one cache file.
pub fn round_size(n: usize) -> usize {
    let mut p = 1usize;
    loop {
        for m in [1, 2, 5] {
            if m * p >= n {
                return m * p;
            }
        }
        p *= 10;
    }
}

/// `(q · 40 √X / H)^2`: a generous dual-side reach for the ω decay.
pub fn dual_reach(x: f64, q: u64, big_h: f64) -> usize {
    let r = q as f64 * 40.0 * x.sqrt() / big_h;
    (r * r).ceil().min(1e12) as usize
}

pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(cache::cache_dir)
}

/// Hecke table of at least `n` entries (capped), through the cache when available.
pub fn hecke(n: usize, cache_dir: Option<&Path>) -> Result<HeckeTable> {
    if n > HECKE_CAP {
        return Err(Error::Capacity { requested: n as u64, cap: HECKE_CAP as u64 });
    }
    if let Some(t) = cache_dir.and_then(|d| smallest_cached(d, n)).and_then(|p| cache::read(&p).ok()) {
        return Ok(t.1);
    }
    let n = round_size(n).min(HECKE_CAP);
    Ok(cache::load_or_build(cache_dir, n)?.1)
}

/// The smallest cache file in `dir` holding at least `n` entries.
fn smallest_cached(dir: &Path, n: usize) -> Option<PathBuf> {
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            let m: usize = name.strip_prefix("apvar-tables-")?.strip_suffix(".bin")?.parse().ok()?;
            (m >= n).then_some(m)
        })
        .min()
        .map(|m| cache::cache_path(dir, m))
}

/// Sieve tables of at least `min(n, cap)` entries.
pub fn arith(n: usize) -> Result<ArithTables> {
    ArithTables::build(round_size(n).min(ARITH_CAP))
}

/// Runs `f` on tables of growing size until it stops asking for more.
pub fn with_growth<T, R>(
    start: usize,
    cap: usize,
    mut build: impl FnMut(usize) -> Result<T>,
    mut f: impl FnMut(&T) -> Result<R>,
) -> Result<R> {
    let mut n = start.min(cap);
    loop {
        let t = build(n)?;
        match f(&t) {
            Err(Error::InsufficientTable { needed, available }) if n < cap => {
                n = (needed as usize).max(2 * available as usize).min(cap);
            }
            other => return other,
        }
    }
}
