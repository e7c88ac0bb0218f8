//! W3ID generation and verification.
//!
//! A W3ID is the SHA-256 digest, in lowercase hex, of a fixed preimage:
//! the 20 ASCII digits of the timestamp followed by the raw object bytes.
//! The timestamp travels with the identifier in an [`IdRecord`], because
//! verification re-derives the preimage.

use std::io::{self, Read};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, W3idError};
use crate::object::CanonicalObject;
use crate::timestamp::{MonotonicIssuer, Timestamp};

/// Identifier length in lowercase hex characters (256 bits).
pub const W3ID_HEX_LEN: usize = 64;

/// Current sidecar/preimage format version.
pub const FORMAT_VERSION: u32 = 1;

/// One issued identifier together with the timestamp that produced it.
///
/// The JSON form is the sidecar record
/// `{"version":1,"w3id":"<64 hex>","timestamp":"<20 digits>"}` with exactly
/// these members; unknown members are rejected on read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdRecord {
    pub version: u32,
    pub w3id: String,
    pub timestamp: Timestamp,
}

impl IdRecord {
    /// Structural check: version recognized, identifier 64 lowercase hex.
    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(W3idError::MalformedId(format!(
                "unsupported record version {}",
                self.version
            )));
        }
        require_lower_hex(&self.w3id, W3ID_HEX_LEN).map_err(W3idError::MalformedId)
    }

    /// Single-line sidecar JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sidecar record serializes")
    }

    /// Parse and validate a sidecar record.
    pub fn from_json(s: &str) -> Result<Self> {
        let record: IdRecord =
            serde_json::from_str(s).map_err(|e| W3idError::MalformedId(e.to_string()))?;
        record.validate()?;
        Ok(record)
    }
}

pub(crate) fn require_lower_hex(s: &str, expected_len: usize) -> std::result::Result<(), String> {
    if s.len() != expected_len {
        return Err(format!("expected {expected_len} characters, got {}", s.len()));
    }
    match s.bytes().position(|b| !matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        Some(pos) => Err(format!("non lowercase-hex character at position {pos}")),
        None => Ok(()),
    }
}

/// The exact byte sequence that is hashed: ASCII timestamp, then object
/// bytes. Total length is 20 + object length.
pub fn build_preimage(ts: &Timestamp, obj: &CanonicalObject) -> Vec<u8> {
    let mut preimage = Vec::with_capacity(crate::timestamp::TIMESTAMP_DIGITS + obj.len());
    preimage.extend_from_slice(ts.format().as_bytes());
    preimage.extend_from_slice(obj.bytes());
    preimage
}

/// Hash `timestamp ‖ object` into an identifier record. Deterministic.
///
/// The preimage is never materialized: the hasher consumes the 20
/// timestamp bytes, then the object bytes.
pub fn generate(ts: &Timestamp, obj: &CanonicalObject) -> IdRecord {
    let mut hasher = Sha256::new();
    hasher.update(ts.format().as_bytes());
    hasher.update(obj.bytes());
    IdRecord { version: FORMAT_VERSION, w3id: hex::encode(hasher.finalize()), timestamp: *ts }
}

/// Streaming variant of [`generate`] for objects too large to hold in
/// memory; hashes the stream in 64 KiB chunks.
pub fn generate_from_reader(ts: &Timestamp, mut reader: impl Read) -> io::Result<IdRecord> {
    let mut hasher = Sha256::new();
    hasher.update(ts.format().as_bytes());
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(IdRecord { version: FORMAT_VERSION, w3id: hex::encode(hasher.finalize()), timestamp: *ts })
}

/// Generate with a fresh timestamp from the issuer. Repeated calls on the
/// same object always yield distinct identifiers.
pub fn generate_now(obj: &CanonicalObject, issuer: &MonotonicIssuer) -> Result<IdRecord> {
    Ok(generate(&issuer.next()?, obj))
}

/// Re-derive the identifier from the record's timestamp and the presented
/// object. `Ok(false)` means a well-formed record that does not match;
/// malformed records error instead.
pub fn recompute_matches(record: &IdRecord, obj: &CanonicalObject) -> Result<bool> {
    record.validate()?;
    Ok(generate(&record.timestamp, obj).w3id == record.w3id)
}
