//! Memoized joint-cumulant store with an optional on-disk JSON cache.
//!
//! One file per key, named `{kind}_{k}_{l}.json`, holding the versioned
//! expression schema plus a SHA-256 content hash; cache hits must
//! hash-verify before they are trusted.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::symexpr::{ExprJson, SymExpr};

/// The two ancillary statistic families of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatKind {
    /// `T_k = sum x_i^k ln x_i`
    Tk,
    /// `R_k = sum x_i^k`
    Rk,
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatKind::Tk => write!(f, "T"),
            StatKind::Rk => write!(f, "R"),
        }
    }
}

impl FromStr for StatKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" => Ok(StatKind::Tk),
            "R" => Ok(StatKind::Rk),
            other => Err(format!("unknown statistic kind {other:?}")),
        }
    }
}

/// Memo key for `kappa_l(X_k, T, ..., T)` with `l-1` trailing `T` slots; the
/// distinguished statistic always sits in slot 1 (joint cumulants are
/// permutation symmetric). `kind = Tk, k = 1` is the cumulant of `T` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CumulantKey {
    pub kind: StatKind,
    pub k: u32,
    pub order: u32,
}

impl CumulantKey {
    pub fn new(kind: StatKind, k: u32, order: u32) -> Self {
        assert!(order >= 1, "cumulant order must be >= 1");
        CumulantKey { kind, k, order }
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}_{}.json", self.kind, self.k, self.order)
    }
}

impl fmt::Display for CumulantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kappa_{}({}_{}, T...)", self.order, self.kind, self.k)
    }
}

/// Errors raised by cache persistence.
#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache entry {file}: {detail}")]
    Malformed { file: String, detail: String },
    #[error("cache entry {file}: content hash mismatch")]
    HashMismatch { file: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    schema: u32,
    kind: String,
    k: u32,
    order: u32,
    sha256: String,
    expr: ExprJson,
}

fn expr_hash(expr: &ExprJson) -> String {
    let bytes = serde_json::to_string(expr).expect("serializable");
    let mut h = Sha256::new();
    h.update(bytes.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        use std::fmt::Write;
        write!(s, "{b:02x}").unwrap();
    }
    s
}

/// Append-only (within a run) map from keys to canonical expressions,
/// write-through to the cache directory when one is configured.
#[derive(Debug)]
pub struct CumulantStore {
    map: BTreeMap<CumulantKey, SymExpr>,
    dir: Option<PathBuf>,
}

impl CumulantStore {
    pub fn in_memory() -> Self {
        CumulantStore { map: BTreeMap::new(), dir: None }
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(CumulantStore { map: BTreeMap::new(), dir: Some(dir) })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CumulantKey> {
        self.map.keys()
    }

    pub fn get(&self, key: &CumulantKey) -> Option<&SymExpr> {
        self.map.get(key)
    }

    /// Look up a key, falling back to a hash-verified disk read.
    pub fn fetch(&mut self, key: &CumulantKey) -> Result<Option<&SymExpr>, StoreError> {
        if !self.map.contains_key(key) {
            if let Some(expr) = self.read_disk(key)? {
                self.map.insert(*key, expr);
            }
        }
        Ok(self.map.get(key))
    }

    /// Insert a computed expression; writes through to disk.
    pub fn insert(&mut self, key: CumulantKey, expr: SymExpr) -> Result<(), StoreError> {
        debug_assert!(expr.is_canonical(), "store accepts canonical expressions only");
        if let Some(dir) = self.dir.clone() {
            self.write_disk(&dir, &key, &expr)?;
        }
        self.map.insert(key, expr);
        Ok(())
    }

    fn entry_path(dir: &Path, key: &CumulantKey) -> PathBuf {
        dir.join(key.file_name())
    }

    fn read_disk(&self, key: &CumulantKey) -> Result<Option<SymExpr>, StoreError> {
        let Some(dir) = &self.dir else { return Ok(None) };
        let path = Self::entry_path(dir, key);
        if !path.exists() {
            return Ok(None);
        }
        let expr = read_entry(&path, Some(*key))?;
        Ok(Some(expr))
    }

    fn write_disk(&self, dir: &Path, key: &CumulantKey, expr: &SymExpr) -> Result<(), StoreError> {
        let expr_json = expr.to_json(None);
        let entry = CacheEntry {
            schema: 1,
            kind: key.kind.to_string(),
            k: key.k,
            order: key.order,
            sha256: expr_hash(&expr_json),
            expr: expr_json,
        };
        let path = Self::entry_path(dir, key);
        let body = serde_json::to_string(&entry).expect("serializable");
        std::fs::write(path, body)?;
        Ok(())
    }
}

/// Read and hash-verify a single cache file; `expect` additionally checks
/// that the embedded key matches the file name.
pub fn read_entry(path: &Path, expect: Option<CumulantKey>) -> Result<SymExpr, StoreError> {
    let file = path.display().to_string();
    let body = std::fs::read_to_string(path)?;
    let entry: CacheEntry = serde_json::from_str(&body)
        .map_err(|e| StoreError::Malformed { file: file.clone(), detail: e.to_string() })?;
    if entry.schema != 1 {
        return Err(StoreError::Malformed {
            file,
            detail: format!("unsupported schema {}", entry.schema),
        });
    }
    if entry.sha256 != expr_hash(&entry.expr) {
        return Err(StoreError::HashMismatch { file });
    }
    if let Some(key) = expect {
        let kind: StatKind = entry
            .kind
            .parse()
            .map_err(|detail| StoreError::Malformed { file: file.clone(), detail })?;
        if (kind, entry.k, entry.order) != (key.kind, key.k, key.order) {
            return Err(StoreError::Malformed {
                file,
                detail: "entry key does not match file name".to_string(),
            });
        }
    }
    let expr = SymExpr::from_json(&entry.expr)
        .map_err(|e| StoreError::Malformed { file, detail: e.to_string() })?;
    Ok(expr)
}

/// List the cache entries present in a directory (sorted by file name).
pub fn list_dir(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.extension().map(|x| x == "json").unwrap_or(false) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}
