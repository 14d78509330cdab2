//! On-disk series cache: one JSON file per `(k, l, z)`.
//!
//! Integers are stored as decimal strings. Writes go to a temporary file in the
//! same directory and are renamed into place, so concurrent readers never see a
//! partial entry.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::asymptotics::ExpansionJson;
use crate::error::{Error, Result};
use crate::recurrence::{self, OperatorJson, RecurrenceOperator};
use crate::sequence::{SeriesBuilder, SeriesKey, SequenceRecord};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "HOOKREC_CACHE_DIR";

pub const CACHE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub k: u32,
    pub l: u32,
    pub z: u32,
    pub start: u64,
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<ExpansionJson>,
    pub version: String,
}

impl CacheEntry {
    pub fn from_record(key: SeriesKey, seq: &SequenceRecord) -> Self {
        Self {
            k: key.k,
            l: key.l,
            z: key.z,
            start: seq.start,
            terms: seq.terms.iter().map(Integer::to_string).collect(),
            operator: None,
            expansion: None,
            version: CACHE_VERSION.to_string(),
        }
    }

    pub fn key(&self) -> Result<SeriesKey> {
        SeriesKey::new(self.k, self.l, self.z)
    }

    pub fn record(&self) -> Result<SequenceRecord> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.parse::<Integer>().map_err(|e| Error::Cache(format!("bad term {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequenceRecord::new(Some(self.key()?), self.start, terms))
    }

    pub fn operator(&self) -> Result<Option<RecurrenceOperator>> {
        self.operator.as_ref().map(RecurrenceOperator::from_json).transpose()
    }

    /// Checks that the stored operator, if any, annihilates the stored terms.
    pub fn validate(&self) -> Result<()> {
        if let Some(op) = self.operator()? {
            let report = recurrence::verify(&op, &self.record()?, 0);
            if !report.holds {
                return Err(Error::Cache(format!(
                    "cached operator for (k,l,z)=({},{},{}) fails on cached terms: {report}",
                    self.k, self.l, self.z
                )));
            }
        }
        Ok(())
    }
}

/// Directory of cache entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl SeriesCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Explicit directory first, then [`CACHE_DIR_ENV`]; `None` disables caching.
    pub fn resolve(explicit: Option<&Path>) -> Option<Self> {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: SeriesKey) -> PathBuf {
        self.dir.join(format!("series_k{}_l{}_z{}.json", key.k, key.l, key.z))
    }

    pub fn load(&self, key: SeriesKey) -> Result<Option<CacheEntry>> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = serde_json::from_str(&text)?;
        if entry.key()? != key {
            return Err(Error::Cache(format!("{} holds a different key", path.display())));
        }
        entry.validate()?;
        Ok(Some(entry))
    }

    pub fn store(&self, entry: &CacheEntry) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path_for(entry.key()?);
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            target.file_name().and_then(|n| n.to_str()).unwrap_or("entry"),
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let result = (|| {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(serde_json::to_string_pretty(entry)?.as_bytes())?;
            file.sync_all()?;
            fs::rename(&tmp, &target)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result
    }

    /// Terms `S(0..=n_max)`, reusing a long enough cached prefix.
    ///
    /// A shorter entry is recomputed to `n_max`, checked against the cached
    /// prefix and written back with its operator and expansion kept.
    pub fn series(&self, key: SeriesKey, n_max: u32) -> Result<SequenceRecord> {
        let cached = self.load(key)?;
        if let Some(entry) = &cached {
            let rec = entry.record()?;
            if rec.start == 0 && rec.end() >= i64::from(n_max) {
                return Ok(rec.truncated(u64::from(n_max)));
            }
        }
        let mut builder = SeriesBuilder::new(key);
        builder.extend_to(n_max);
        let fresh = builder.record();
        let mut entry = CacheEntry::from_record(key, &fresh);
        if let Some(old) = cached {
            let old_rec = old.record()?;
            if old_rec.start != 0 || old_rec.terms[..] != fresh.terms[..old_rec.len()] {
                return Err(Error::Cache(format!(
                    "cached terms for (k,l,z)=({},{},{}) disagree with a fresh computation",
                    key.k, key.l, key.z
                )));
            }
            entry.operator = old.operator;
            entry.expansion = old.expansion;
        }
        self.store(&entry)?;
        Ok(fresh)
    }

    /// Records a fitted operator (and optionally its expansion) next to the cached terms.
    pub fn attach(
        &self,
        key: SeriesKey,
        seq: &SequenceRecord,
        op: &RecurrenceOperator,
        expansion: Option<ExpansionJson>,
    ) -> Result<()> {
        let mut entry = match self.load(key)? {
            Some(e) if e.record()?.len() >= seq.len() => e,
            _ => CacheEntry::from_record(key, seq),
        };
        entry.operator = Some(op.to_json());
        if expansion.is_some() {
            entry.expansion = expansion;
        }
        entry.validate()?;
        self.store(&entry)
    }
}
