//! W3ID content identifiers.
//!
//! A W3ID is the SHA-256 of a 20-digit UTC timestamp concatenated with an
//! object's raw bytes, rendered as 64 lowercase hex characters. The first
//! 32 characters are the public key (an openly shareable handle), the last
//! 32 the private key (a possession token). This crate covers the full
//! lifecycle: ingestion, timestamping, generation, dual-key verification,
//! quadruple chains with causality checking, QR rendering, and a durable
//! resolver registry.

pub mod auth;
pub mod chain;
pub mod error;
pub mod id;
pub mod object;
pub mod qr;
pub mod registry;
pub mod timestamp;

pub use auth::{private_authenticate, public_verify, split, KeyPair, KEY_HEX_LEN};
pub use chain::{
    generate_chain, validate_chain, ChainReport, QuadChain, ValidationPolicy, CHAIN_LEN,
};
pub use error::{Result, W3idError};
pub use id::{
    build_preimage, generate, generate_from_reader, generate_now, recompute_matches, IdRecord,
    FORMAT_VERSION, W3ID_HEX_LEN,
};
pub use object::{content_digest_from_reader, CanonicalObject};
pub use qr::{render_qr, EcLevel, QrSymbol};
pub use registry::{Registry, RegistryRecord};
pub use timestamp::{
    now_utc, Clock, ManualClock, MonotonicIssuer, SystemClock, Timestamp, TIMESTAMP_DIGITS,
};
