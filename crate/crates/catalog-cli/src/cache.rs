//! On-disk results cache, laid out as
//! `<root>/<engine-version>/<label>/<command-hash>.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kodaira_core::ENGINE_VERSION;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Overrides the cache directory when `--cache-dir` is not given.
pub const CACHE_ENV: &str = "KODAIRA_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corrupt cache record {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

/// One cached computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub label: String,
    pub parameters: Value,
    pub payload: Value,
    pub engine_version: String,
    pub wall_time_ms: u64,
    pub shards: usize,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: Some(root.into()) }
    }

    /// A cache that never stores anything.
    pub fn disabled() -> Self {
        Cache { root: None }
    }

    /// `explicit`, else `$KODAIRA_CACHE_DIR`, else `$XDG_CACHE_HOME/kodaira`
    /// or `~/.cache/kodaira`.
    pub fn resolve(explicit: Option<PathBuf>) -> Self {
        let root = explicit
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|d| PathBuf::from(d).join("kodaira")))
            .or_else(|| std::env::var_os("HOME").map(|d| PathBuf::from(d).join(".cache").join("kodaira")));
        Cache { root }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Where the record for this key lives, if caching is enabled.
    pub fn path_for(&self, command: &str, label: &str, parameters: &Value) -> Option<PathBuf> {
        let root = self.root.as_ref()?;
        let key = serde_json::to_string(&(command, label, parameters, ENGINE_VERSION)).expect("serializable key");
        let hash = hex::encode(Sha256::digest(key.as_bytes()));
        let dir: String = label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        Some(root.join(ENGINE_VERSION).join(dir).join(format!("{command}-{}.json", &hash[..16])))
    }

    pub fn get<T: DeserializeOwned>(&self, command: &str, label: &str, parameters: &Value) -> Result<Option<T>, CacheError> {
        let Some(path) = self.path_for(command, label, parameters) else {
            return Ok(None);
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let corrupt = |reason: String| CacheError::Corrupt { path: path.clone(), reason };
        let record: RunRecord = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if record.command != command
            || record.label != label
            || &record.parameters != parameters
            || record.engine_version != ENGINE_VERSION
        {
            return Err(corrupt("key fields do not match the requested computation".into()));
        }
        serde_json::from_value(record.payload).map(Some).map_err(|e| corrupt(e.to_string()))
    }

    /// Writes atomically: a temporary file in the target directory, then a rename.
    pub fn put<T: Serialize>(
        &self,
        command: &str,
        label: &str,
        parameters: &Value,
        payload: &T,
        wall_time_ms: u64,
        shards: usize,
    ) -> Result<(), CacheError> {
        let Some(path) = self.path_for(command, label, parameters) else {
            return Ok(());
        };
        let record = RunRecord {
            command: command.into(),
            label: label.into(),
            parameters: parameters.clone(),
            payload: serde_json::to_value(payload).expect("serializable payload"),
            engine_version: ENGINE_VERSION.into(),
            wall_time_ms,
            shards,
        };
        let dir = path.parent().expect("cache path has a parent");
        let io = |source| CacheError::Io { path: path.clone(), source };
        fs::create_dir_all(dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(serde_json::to_string_pretty(&record).expect("serializable record").as_bytes())
            .map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Returns the cached payload or runs `compute` (which also reports its
    /// shard count) and stores the result.
    pub fn get_or_compute<T, E, F>(&self, command: &str, label: &str, parameters: &Value, compute: F) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
        E: From<CacheError>,
        F: FnOnce() -> Result<(T, usize), E>,
    {
        if let Some(hit) = self.get(command, label, parameters)? {
            return Ok(hit);
        }
        let start = Instant::now();
        let (value, shards) = compute()?;
        self.put(command, label, parameters, &value, start.elapsed().as_millis() as u64, shards)?;
        Ok(value)
    }
}
