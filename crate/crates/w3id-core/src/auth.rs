//! Dual-key verification: the first 32 hex characters of an identifier act
//! as the public key, the last 32 as the private key.
//!
//! Security caveat, by construction of the scheme: anyone holding the
//! object bytes and the timestamp can recompute the full hash and with it
//! the private half. The private key is a possession token, not an
//! asymmetric key. Treat the (object, timestamp) pair as secret wherever
//! the private half must stay secret.

use crate::error::{Result, W3idError};
use crate::id::{generate, require_lower_hex, W3ID_HEX_LEN};
use crate::object::CanonicalObject;
use crate::timestamp::Timestamp;

/// Key length in lowercase hex characters: half an identifier.
pub const KEY_HEX_LEN: usize = 32;

/// The two halves of a W3ID. Concatenating them reconstitutes the
/// originating 64-character identifier exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    public_key: String,
    private_key: String,
}

impl KeyPair {
    /// First 32 hex characters: the openly shareable identity handle.
    pub fn public_key(&self) -> &str {
        &self.public_key
    }

    /// Last 32 hex characters: the possession token for authentication.
    pub fn private_key(&self) -> &str {
        &self.private_key
    }

    /// Reassemble the full 64-character identifier.
    pub fn w3id(&self) -> String {
        format!("{}{}", self.public_key, self.private_key)
    }
}

/// Split a 64-character identifier at the fixed 32/32 boundary.
/// Uppercase or non-hex input is rejected, keeping records bit-exact.
pub fn split(w3id: &str) -> Result<KeyPair> {
    require_lower_hex(w3id, W3ID_HEX_LEN).map_err(W3idError::MalformedId)?;
    Ok(KeyPair {
        public_key: w3id[..KEY_HEX_LEN].to_string(),
        private_key: w3id[KEY_HEX_LEN..].to_string(),
    })
}

/// Check that the public half of `generate(ts, obj)` equals `public_key`.
///
/// The timestamp must be supplied because the public key alone cannot
/// re-derive the preimage; callers obtain it from the sidecar record or
/// the registry.
pub fn public_verify(obj: &CanonicalObject, ts: &Timestamp, public_key: &str) -> Result<bool> {
    require_lower_hex(public_key, KEY_HEX_LEN).map_err(W3idError::MalformedKey)?;
    let derived = generate(ts, obj);
    Ok(constant_time_eq(&derived.w3id.as_bytes()[..KEY_HEX_LEN], public_key.as_bytes()))
}

/// Compare a presented private key (or a full 64-character hash, whose
/// last 32 characters are taken) against the reference private half.
/// The comparison runs in time independent of the first mismatch.
pub fn private_authenticate(presented: &str, reference_private: &str) -> Result<bool> {
    require_lower_hex(reference_private, KEY_HEX_LEN).map_err(W3idError::MalformedKey)?;
    let presented_half = extract_private_half(presented)?;
    Ok(constant_time_eq(presented_half.as_bytes(), reference_private.as_bytes()))
}

/// Accepts 32 hex chars (a private half) or 64 hex chars (a full
/// identifier) and returns the private half.
pub(crate) fn extract_private_half(presented: &str) -> Result<&str> {
    match presented.len() {
        KEY_HEX_LEN => {
            require_lower_hex(presented, KEY_HEX_LEN).map_err(W3idError::MalformedKey)?;
            Ok(presented)
        }
        W3ID_HEX_LEN => {
            require_lower_hex(presented, W3ID_HEX_LEN).map_err(W3idError::MalformedKey)?;
            Ok(&presented[KEY_HEX_LEN..])
        }
        other => Err(W3idError::MalformedKey(format!(
            "expected 32 or 64 hex characters, got {other}"
        ))),
    }
}

pub(crate) fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut diff = 0u8;
    for (x, y) in a.iter().zip(b.iter()) {
        diff |= x ^ y;
    }
    diff == 0
}
