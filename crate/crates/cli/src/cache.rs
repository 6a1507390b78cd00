//! On-disk row cache: one JSON object per line, keyed by `(n, a, p)` and
//! tagged with the arithmetic version that produced it. Malformed lines
//! and lines from other versions are ignored, so the file can be deleted
//! or truncated at any time.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::table::TableRow;

/// Overrides the cache location when set.
pub const CACHE_ENV: &str = "IMAGCLASS_CACHE";

/// Bumped whenever a change could alter a computed row.
pub const CACHE_VERSION: &str = concat!("imagclass-", env!("CARGO_PKG_VERSION"), "/rows-1");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub version: String,
    pub n: u32,
    pub a: u64,
    pub p: u64,
    #[serde(with = "crate::jsonnum")]
    pub a2_minus_4pn: BigInt,
    #[serde(with = "crate::jsonnum")]
    pub d: BigInt,
    pub h: u64,
    pub order: u64,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub exceptional: bool,
}

impl CacheRecord {
    pub fn from_row(row: &TableRow) -> Self {
        CacheRecord {
            version: CACHE_VERSION.to_string(),
            n: row.n,
            a: row.a,
            p: row.p,
            a2_minus_4pn: row.a2_minus_4pn.clone(),
            d: row.d.clone(),
            h: row.h,
            order: row.order,
            cond_i: row.cond_i,
            cond_ii: row.cond_ii,
            exceptional: row.exceptional,
        }
    }

    pub fn into_row(self) -> TableRow {
        TableRow {
            n: self.n,
            a: self.a,
            p: self.p,
            a2_minus_4pn: self.a2_minus_4pn,
            d: self.d,
            h: self.h,
            order: self.order,
            cond_i: self.cond_i,
            cond_ii: self.cond_ii,
            exceptional: self.exceptional,
            paper_h: None,
            mismatch: false,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

pub fn parse_cache_line(line: &str) -> Result<CacheRecord, serde_json::Error> {
    serde_json::from_str(line)
}

/// Picks the cache path: an explicit flag first, then [`CACHE_ENV`].
pub fn resolve_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

#[derive(Debug, Default)]
pub struct Cache {
    pub rows: HashMap<(u32, u64, u64), TableRow>,
    /// Lines skipped as malformed or from another version.
    pub skipped: usize,
}

impl Cache {
    /// Loads `path`; a missing file is an empty cache.
    pub fn load(path: &Path) -> io::Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Cache::default()),
            Err(e) => return Err(e),
        };
        Ok(Cache::from_text(&text))
    }

    pub fn from_text(text: &str) -> Self {
        let mut cache = Cache::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match parse_cache_line(line) {
                Ok(rec) if rec.version == CACHE_VERSION => {
                    let row = rec.into_row();
                    cache.rows.insert(row.key(), row);
                }
                _ => cache.skipped += 1,
            }
        }
        cache
    }
}

/// Appends records for `rows`, one line each.
pub fn append(path: &Path, rows: &[&TableRow]) -> io::Result<()> {
    if rows.is_empty() {
        return Ok(());
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut buf = String::new();
    for row in rows {
        buf.push_str(&CacheRecord::from_row(row).to_line());
        buf.push('\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(buf.as_bytes())?;
    f.sync_data()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> TableRow {
        TableRow {
            n: 9,
            a: 1,
            p: 13,
            a2_minus_4pn: BigInt::from(-42_417_997_491i64),
            d: BigInt::from(42_417_997_491i64),
            h: 51480,
            order: 9,
            cond_i: true,
            cond_ii: true,
            exceptional: false,
            paper_h: Some(51480),
            mismatch: false,
        }
    }

    #[test]
    fn line_round_trip() {
        let rec = CacheRecord::from_row(&row());
        let line = rec.to_line();
        assert!(line.contains("\"d\":42417997491"));
        assert_eq!(parse_cache_line(&line).unwrap(), rec);
        let back = parse_cache_line(&line).unwrap().into_row();
        assert_eq!(back.paper_h, None);
        assert_eq!(back.h, 51480);
    }

    #[test]
    fn tolerant_loading() {
        let good = CacheRecord::from_row(&row()).to_line();
        let mut old = CacheRecord::from_row(&row());
        old.version = "imagclass-0.0.0/rows-0".into();
        let text = format!("{good}\n{{not json\n\n{}\n{}", old.to_line(), &good[..good.len() / 2]);
        let cache = Cache::from_text(&text);
        assert_eq!(cache.rows.len(), 1);
        assert_eq!(cache.skipped, 3);
    }

    #[test]
    fn rejects_fractional_and_unknown_fields() {
        let line = CacheRecord::from_row(&row()).to_line();
        assert!(parse_cache_line(&line.replace("\"h\":51480", "\"h\":51480.5")).is_err());
        assert!(parse_cache_line(&line.replace("\"d\":42417997491", "\"d\":4.2e10")).is_err());
        assert!(parse_cache_line(&line.replace('}', ",\"x\":1}")).is_err());
    }

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("cache.jsonl");
        assert!(Cache::load(&path).unwrap().rows.is_empty());
        let r = row();
        append(&path, &[&r]).unwrap();
        append(&path, &[&r]).unwrap();
        let cache = Cache::load(&path).unwrap();
        assert_eq!(cache.rows.len(), 1);
        assert_eq!(cache.skipped, 0);
    }
}
