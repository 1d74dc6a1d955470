//! Text cache of Frobenius traces, one file per Weierstrass model, lines `ℓ a_ℓ`.

use std::io::Write;
use std::path::{Path, PathBuf};

use falsetate::elliptic::{ApTable, EllipticCurveModel};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file {path} line {line}: cannot parse")]
    CacheCorrupt { path: PathBuf, line: usize, max_prime: u64 },
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn path_for(dir: &Path, a: [i64; 5]) -> PathBuf {
    let key = a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("_");
    dir.join(format!("ap_{key}.txt"))
}

/// Temp-and-rename in the target directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CacheError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn render(t: &ApTable) -> String {
    t.primes.iter().zip(&t.ap).map(|(l, a)| format!("{l} {a}\n")).collect()
}

pub fn parse(path: &Path, text: &str) -> Result<ApTable, CacheError> {
    let mut t = ApTable { primes: vec![], ap: vec![] };
    let mut bad = None;
    let mut max_prime = 0;
    for (i, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let first = it.next().and_then(|x| x.parse::<u64>().ok());
        if let Some(l) = first {
            max_prime = max_prime.max(l);
        }
        match (first, it.next().and_then(|x| x.parse::<i64>().ok()), it.next()) {
            (Some(l), Some(a), None) if t.primes.last().map_or(true, |&p| p < l) => {
                t.primes.push(l);
                t.ap.push(a);
            }
            _ => {
                bad.get_or_insert(i + 1);
            }
        }
    }
    match bad {
        Some(line) => Err(CacheError::CacheCorrupt { path: path.to_path_buf(), line, max_prime }),
        None => Ok(t),
    }
}

/// Cached table, or None when the file is absent.
pub fn read(dir: &Path, a: [i64; 5]) -> Result<Option<ApTable>, CacheError> {
    let path = path_for(dir, a);
    match std::fs::read_to_string(&path) {
        Ok(text) => parse(&path, &text).map(Some),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Writes `t` unless the file already holds at least as many primes.
pub fn store(dir: &Path, a: [i64; 5], t: &ApTable) -> Result<(), CacheError> {
    if let Ok(Some(old)) = read(dir, a) {
        if old.primes.len() >= t.primes.len() {
            return Ok(());
        }
    }
    write_atomic(&path_for(dir, a), render(t).as_bytes())
}

/// a_ℓ for ℓ ≤ limit: cached entries are reused, the rest counted and appended.
/// A corrupt file is recounted from scratch up to its largest readable prime.
pub fn get_or_count(dir: &Path, e: &EllipticCurveModel, limit: u64) -> Result<ApTable, CacheError> {
    let path = path_for(dir, e.a);
    let (known, bound, dirty) = match read(dir, e.a) {
        Ok(Some(t)) => {
            let b = t.bound().max(limit);
            let dirty = t.bound() < limit;
            (t, b, dirty)
        }
        Ok(None) => (ApTable { primes: vec![], ap: vec![] }, limit, true),
        Err(CacheError::CacheCorrupt { max_prime, .. }) => {
            (ApTable { primes: vec![], ap: vec![] }, max_prime.max(limit), true)
        }
        Err(e) => return Err(e),
    };
    let t = if dirty || known.primes.is_empty() { ApTable::extend(e, known, bound) } else { known };
    if dirty {
        write_atomic(&path, render(&t).as_bytes())?;
    }
    Ok(t)
}
