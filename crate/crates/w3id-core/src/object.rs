//! Byte-level ingestion of digital objects.
//!
//! Any byte sequence is a valid object: text, image, video, or anything
//! else. Ingestion is the identity on bytes; no transformation,
//! compression, or normalization is ever applied.

use std::io::{self, Read};

use sha2::{Digest, Sha256};

/// An ingested digital object: raw bytes plus derived views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalObject {
    bytes: Vec<u8>,
}

impl CanonicalObject {
    /// Take ownership of raw bytes, bit-identical to the submission.
    /// Empty objects are legal.
    pub fn ingest(raw: impl Into<Vec<u8>>) -> Self {
        CanonicalObject { bytes: raw.into() }
    }

    /// Read an entire stream into an object.
    pub fn from_reader(reader: &mut dyn Read) -> io::Result<Self> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        Ok(CanonicalObject { bytes })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Lowercase hexadecimal rendering, exactly two characters per byte.
    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    /// SHA-256 over the object bytes alone (no timestamp), as 64 lowercase
    /// hex characters. This is the timestamp-free identity used for
    /// duplicate detection.
    pub fn content_digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

impl From<Vec<u8>> for CanonicalObject {
    fn from(bytes: Vec<u8>) -> Self {
        CanonicalObject { bytes }
    }
}

impl From<&[u8]> for CanonicalObject {
    fn from(bytes: &[u8]) -> Self {
        CanonicalObject { bytes: bytes.to_vec() }
    }
}

/// Chunked SHA-256 of a stream, for inputs too large to hold in memory.
/// Equals [`CanonicalObject::content_digest`] on the same bytes.
pub fn content_digest_from_reader(mut reader: impl Read) -> io::Result<String> {
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
