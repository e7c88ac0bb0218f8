use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, W3idError>;

/// All failure modes of the core library.
#[derive(Debug, Error)]
pub enum W3idError {
    /// A timestamp string was not exactly 20 bytes long.
    #[error("timestamp must be exactly 20 ASCII digits, got {0} bytes")]
    WrongLength(usize),

    /// A timestamp string contained a byte outside `0-9`.
    #[error("timestamp contains a non-digit byte at position {0}")]
    NonDigit(usize),

    /// A timestamp field was outside its permitted range.
    #[error("timestamp field {field} has out-of-range value {value}")]
    OutOfRange { field: &'static str, value: u32 },

    /// Field values were individually in range but name no calendar day.
    #[error("no such calendar date: {year:04}-{month:02}-{day:02}")]
    InvalidDate { year: u16, month: u8, day: u8 },

    /// The wall clock could not be read.
    #[error("clock unavailable: {0}")]
    ClockUnavailable(String),

    /// Timestamp arithmetic left the representable range (years 0001-9999).
    #[error("timestamp outside the representable range 0001-9999")]
    Overflow,

    /// An identifier was not 64 lowercase hex characters, or a sidecar
    /// record failed structural validation.
    #[error("malformed identifier: {0}")]
    MalformedId(String),

    /// A key or digest argument had the wrong length or alphabet.
    #[error("malformed key: {0}")]
    MalformedKey(String),

    /// A chain did not consist of exactly four well-formed records.
    #[error("malformed chain: {0}")]
    MalformedChain(String),

    /// A record presented for registration does not match its object.
    #[error("identifier does not match the supplied object bytes")]
    VerificationFailed,

    /// The public key is already present in the registry.
    #[error("public key {0} is already registered")]
    DuplicateId(String),

    /// No registry entry exists for the requested public key.
    #[error("public key {0} is not registered")]
    NotFound(String),

    /// The backing store could not be read or written.
    #[error("storage failure: {0}")]
    Storage(String),
}

impl W3idError {
    pub(crate) fn storage(context: &str, err: std::io::Error) -> Self {
        W3idError::Storage(format!("{context}: {err}"))
    }
}
