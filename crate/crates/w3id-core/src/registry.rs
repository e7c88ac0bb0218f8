//! DOI-style resolver registry.
//!
//! Persistence is an append-only log: one JSON record per line, UTF-8,
//! newline-delimited. An in-memory index is rebuilt on open. Private key
//! halves are never persisted; only their SHA-256 digest is stored, so a
//! leaked store file does not leak authentication secrets.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::auth::{constant_time_eq, extract_private_half, split};
use crate::error::{Result, W3idError};
use crate::id::{recompute_matches, require_lower_hex, IdRecord, W3ID_HEX_LEN};
use crate::object::CanonicalObject;
use crate::timestamp::{Clock, Timestamp};

/// One resolver entry. `public_key` is the primary key of the store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryRecord {
    /// First half of the identifier; unique across the store.
    pub public_key: String,
    /// SHA-256 of the ASCII private half. Never the private half itself.
    pub private_digest: String,
    /// Timestamp from the identifier record.
    pub timestamp: Timestamp,
    /// Timestamp-free digest of the object bytes, for duplicate lookup.
    pub content_digest: String,
    /// Short label of the hosting data-storage platform.
    pub platform: String,
    /// Where the object lives; may be empty.
    pub location_uri: String,
    /// Registry receipt time.
    pub created_at: Timestamp,
}

impl RegistryRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        require_lower_hex(&self.public_key, 32).map_err(|e| format!("public_key: {e}"))?;
        require_lower_hex(&self.private_digest, 64).map_err(|e| format!("private_digest: {e}"))?;
        require_lower_hex(&self.content_digest, 64).map_err(|e| format!("content_digest: {e}"))
    }
}

struct State {
    file: File,
    records: Vec<RegistryRecord>,
    by_key: HashMap<String, usize>,
    by_content: HashMap<String, Vec<usize>>,
}

/// Durable store of registered identifiers.
///
/// Reads share the same lock as writes; check-and-insert is one atomic
/// step, so concurrent registration of the same public key admits exactly
/// one winner.
pub struct Registry {
    path: PathBuf,
    state: Mutex<State>,
}

impl Registry {
    /// Open (or create) a store file and rebuild the index from it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(&path)
            .map_err(|e| W3idError::storage(&format!("open {}", path.display()), e))?;

        let mut records = Vec::new();
        let mut by_key: HashMap<String, usize> = HashMap::new();
        let mut by_content: HashMap<String, Vec<usize>> = HashMap::new();

        let reader = BufReader::new(
            File::open(&path)
                .map_err(|e| W3idError::storage(&format!("open {}", path.display()), e))?,
        );
        for (lineno, line) in reader.lines().enumerate() {
            let line =
                line.map_err(|e| W3idError::storage(&format!("read {}", path.display()), e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: RegistryRecord = serde_json::from_str(&line).map_err(|e| {
                W3idError::Storage(format!("corrupt record at line {}: {e}", lineno + 1))
            })?;
            record.validate().map_err(|e| {
                W3idError::Storage(format!("corrupt record at line {}: {e}", lineno + 1))
            })?;
            if by_key.contains_key(&record.public_key) {
                return Err(W3idError::Storage(format!(
                    "duplicate public key {} at line {}",
                    record.public_key,
                    lineno + 1
                )));
            }
            let idx = records.len();
            by_key.insert(record.public_key.clone(), idx);
            by_content.entry(record.content_digest.clone()).or_default().push(idx);
            records.push(record);
        }

        Ok(Registry { path, state: Mutex::new(State { file, records, by_key, by_content }) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.lock().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Verify the record against the object, then persist a resolver entry.
    ///
    /// The private half is digested before storage and never written raw.
    /// Duplicate content is NOT a registration blocker; identifier
    /// uniqueness (distinct timestamps) is the feature, and duplicate
    /// lookup stays advisory.
    pub fn register(
        &self,
        id_record: &IdRecord,
        obj: &CanonicalObject,
        platform: &str,
        location_uri: &str,
        clock: &dyn Clock,
    ) -> Result<RegistryRecord> {
        if !recompute_matches(id_record, obj)? {
            return Err(W3idError::VerificationFailed);
        }
        let keys = split(&id_record.w3id)?;
        let record = RegistryRecord {
            public_key: keys.public_key().to_string(),
            private_digest: hex::encode(Sha256::digest(keys.private_key().as_bytes())),
            timestamp: id_record.timestamp,
            content_digest: obj.content_digest(),
            platform: platform.to_string(),
            location_uri: location_uri.to_string(),
            created_at: clock.now()?,
        };

        let mut state = self.lock();
        if state.by_key.contains_key(&record.public_key) {
            return Err(W3idError::DuplicateId(record.public_key));
        }
        let mut line = serde_json::to_string(&record)
            .map_err(|e| W3idError::Storage(format!("encode record: {e}")))?;
        line.push('\n');
        state
            .file
            .write_all(line.as_bytes())
            .and_then(|_| state.file.sync_data())
            .map_err(|e| W3idError::storage(&format!("append {}", self.path.display()), e))?;

        let idx = state.records.len();
        state.by_key.insert(record.public_key.clone(), idx);
        state.by_content.entry(record.content_digest.clone()).or_default().push(idx);
        state.records.push(record.clone());
        Ok(record)
    }

    /// Look up the unique record for a public key.
    pub fn resolve(&self, public_key: &str) -> Result<RegistryRecord> {
        require_lower_hex(public_key, 32).map_err(W3idError::MalformedKey)?;
        let state = self.lock();
        state
            .by_key
            .get(public_key)
            .map(|&idx| state.records[idx].clone())
            .ok_or_else(|| W3idError::NotFound(public_key.to_string()))
    }

    /// True iff the digest of the presented private half (or the last 32
    /// characters of a presented full hash) equals the stored digest.
    pub fn authenticate(&self, public_key: &str, presented_private: &str) -> Result<bool> {
        let record = self.resolve(public_key)?;
        let presented_half = extract_private_half(presented_private)?;
        let presented_digest = hex::encode(Sha256::digest(presented_half.as_bytes()));
        Ok(constant_time_eq(presented_digest.as_bytes(), record.private_digest.as_bytes()))
    }

    /// All public keys registered for this content digest, ordered by
    /// receipt time ascending. Empty when none.
    pub fn find_duplicates(&self, content_digest: &str) -> Result<Vec<String>> {
        require_lower_hex(content_digest, W3ID_HEX_LEN).map_err(W3idError::MalformedKey)?;
        let state = self.lock();
        let Some(indices) = state.by_content.get(content_digest) else {
            return Ok(Vec::new());
        };
        let mut hits: Vec<&RegistryRecord> =
            indices.iter().map(|&idx| &state.records[idx]).collect();
        hits.sort_by_key(|r| r.created_at);
        Ok(hits.iter().map(|r| r.public_key.clone()).collect())
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().expect("registry poisoned")
    }
}
