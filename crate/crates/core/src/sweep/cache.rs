//! Append-only JSONL store of computed colengths.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: line {line}: {reason}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Identifies one colength: the curve over the integers, the prime, the
/// ideal and the Frobenius power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    /// SHA-256 of the canonical curve text and the variable list.
    pub curve: String,
    pub p: u64,
    pub ideal: String,
    pub q: u64,
}

impl CacheKey {
    pub fn new(curve_text: &str, vars: &[String], p: u64, ideal_text: &str, q: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(curve_text.as_bytes());
        hasher.update(b"\n");
        hasher.update(vars.join(",").as_bytes());
        Self {
            curve: hex::encode(hasher.finalize()),
            p,
            ideal: ideal_text.to_string(),
            q,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Line {
    curve: String,
    p: u64,
    ideal: String,
    q: u64,
    colength: u64,
    check: String,
}

fn checksum(key: &CacheKey, colength: u64) -> String {
    let text = format!("{}|{}|{}|{}|{}", key.curve, key.p, key.ideal, key.q, colength);
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// In-memory view of the cache file plus its only writer.
#[derive(Debug, Default)]
pub struct ColengthCache {
    path: Option<PathBuf>,
    entries: HashMap<CacheKey, u64>,
    writer: Option<File>,
}

impl ColengthCache {
    /// Cache that never touches the disk.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads every line, failing on a malformed line, a checksum mismatch or
    /// two lines disagreeing on the same key. A missing file is empty.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| CacheError::Io {
            path: path.clone(),
            source,
        };
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io)?);
            for (index, line) in reader.lines().enumerate() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                let corrupt = |reason: String| CacheError::Corrupt {
                    path: path.clone(),
                    line: index + 1,
                    reason,
                };
                let parsed: Line = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
                let key = CacheKey {
                    curve: parsed.curve,
                    p: parsed.p,
                    ideal: parsed.ideal,
                    q: parsed.q,
                };
                if checksum(&key, parsed.colength) != parsed.check {
                    return Err(corrupt("checksum mismatch".into()));
                }
                if let Some(old) = entries.insert(key, parsed.colength) {
                    if old != parsed.colength {
                        return Err(corrupt(format!("conflicting colengths {old} and {}", parsed.colength)));
                    }
                }
            }
        }
        Ok(Self {
            path: Some(path),
            entries,
            writer: None,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<u64> {
        self.entries.get(key).copied()
    }

    /// Records a colength, appending a line to the file when there is one.
    pub fn insert(&mut self, key: CacheKey, colength: u64) -> Result<(), CacheError> {
        if self.entries.get(&key) == Some(&colength) {
            return Ok(());
        }
        if let Some(path) = &self.path {
            let io = |source| CacheError::Io {
                path: path.clone(),
                source,
            };
            if self.writer.is_none() {
                let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
                self.writer = Some(file);
            }
            let line = Line {
                curve: key.curve.clone(),
                p: key.p,
                ideal: key.ideal.clone(),
                q: key.q,
                colength,
                check: checksum(&key, colength),
            };
            let mut text = serde_json::to_string(&line).expect("plain fields serialize");
            text.push('\n');
            let writer = self.writer.as_mut().expect("opened above");
            writer.write_all(text.as_bytes()).map_err(io)?;
            writer.flush().map_err(io)?;
        }
        self.entries.insert(key, colength);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<String> {
        ["x", "y", "z"].map(String::from).to_vec()
    }

    fn key(q: u64) -> CacheKey {
        CacheKey::new("x^4 + y^3*z + x*z^3", &vars(), 5, "x,y,z", q)
    }

    #[test]
    fn keys_depend_on_every_part() {
        let base = key(5);
        assert_eq!(base.curve.len(), 64);
        assert_ne!(base.curve, CacheKey::new("x^3 + y^3 + z^3", &vars(), 5, "x,y,z", 5).curve);
        let uvw = ["u", "v", "w"].map(String::from).to_vec();
        assert_ne!(base.curve, CacheKey::new("x^4 + y^3*z + x*z^3", &uvw, 5, "x,y,z", 5).curve);
        assert_ne!(base, key(25));
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut cache = ColengthCache::open(&path).unwrap();
        assert!(cache.is_empty());
        cache.insert(key(5), 72).unwrap();
        cache.insert(key(25), 1879).unwrap();
        cache.insert(key(5), 72).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);

        let reopened = ColengthCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
        assert_eq!(reopened.get(&key(5)), Some(72));
        assert_eq!(reopened.get(&key(125)), None);
    }

    #[test]
    fn corruption_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut cache = ColengthCache::open(&path).unwrap();
        cache.insert(key(5), 72).unwrap();
        drop(cache);

        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("72", "73")).unwrap();
        let err = ColengthCache::open(&path).unwrap_err();
        assert!(matches!(err, CacheError::Corrupt { line: 1, .. }), "{err}");

        std::fs::write(&path, "{not json\n").unwrap();
        assert!(matches!(ColengthCache::open(&path), Err(CacheError::Corrupt { .. })));
    }

    #[test]
    fn in_memory_cache_writes_nothing() {
        let mut cache = ColengthCache::in_memory();
        cache.insert(key(5), 72).unwrap();
        assert_eq!(cache.get(&key(5)), Some(72));
        assert!(cache.path().is_none());
    }
}
