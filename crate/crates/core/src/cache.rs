//! Append-only JSON-lines store of computed results, keyed by the triple,
//! the method and the seed.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::simplex::Triple;

/// Environment variable naming the default cache file.
pub const CACHE_ENV: &str = "FATPOINTS_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: usize,
    pub d: u32,
    pub m: Vec<u32>,
    /// SHA-256 of the point set, hex encoded.
    pub points: String,
    pub method: String,
    pub seed: Option<u64>,
}

impl CacheKey {
    pub fn new(t: &Triple, method: impl Into<String>, seed: Option<u64>) -> Self {
        let json = serde_json::to_vec(t.points()).expect("points serialize");
        CacheKey {
            n: t.n(),
            d: t.d(),
            m: t.multiplicities().to_vec(),
            points: hex::encode(Sha256::digest(&json)),
            method: method.into(),
            seed,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Line {
    key: CacheKey,
    value: serde_json::Value,
}

pub struct ResultCache {
    path: PathBuf,
    entries: HashMap<CacheKey, serde_json::Value>,
}

impl ResultCache {
    /// Loads the cache at `path`, which need not exist yet. Unreadable lines
    /// are skipped.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        match File::open(&path) {
            Ok(f) => {
                for (no, line) in BufReader::new(f).lines().enumerate() {
                    let line = line.map_err(|e| Error::Cache(e.to_string()))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<Line>(&line) {
                        Ok(l) => {
                            entries.insert(l.key, l.value);
                        }
                        Err(e) => log::warn!("skipping corrupted cache line {} in {}: {e}", no + 1, path.display()),
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::Cache(e.to_string())),
        }
        Ok(ResultCache { path, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let v = self.entries.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                log::warn!("cached value for {key:?} does not parse: {e}");
                None
            }
        }
    }

    /// Returns the stored value for `key`, computing and appending it first
    /// when absent.
    pub fn get_or_compute<T, F>(&mut self, key: CacheKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(t) = self.get(&key) {
            log::debug!("cache hit for {key:?}");
            return Ok(t);
        }
        let t = compute()?;
        let value = serde_json::to_value(&t).map_err(|e| Error::Cache(e.to_string()))?;
        let line = serde_json::to_string(&Line { key: key.clone(), value: value.clone() })
            .map_err(|e| Error::Cache(e.to_string()))?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::Cache(e.to_string()))?;
        writeln!(f, "{line}").map_err(|e| Error::Cache(e.to_string()))?;
        self.entries.insert(key, value);
        Ok(t)
    }
}
