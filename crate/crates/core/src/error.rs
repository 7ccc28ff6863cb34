use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed text input or an out-of-range reference.
    #[error("input error: {0}")]
    Input(String),
    /// An operation needs data that the object does not carry (e.g. a letter projection).
    #[error("configuration error: {0}")]
    Config(String),
    /// A lattice cut left an incomplete block at the border of a patch.
    #[error("boundary error: block ({bx}, {by}) is incomplete")]
    Boundary { bx: usize, by: usize },
    /// Parameters too small (or too large) for the requested construction.
    #[error("sizing error: {0}")]
    Sizing(String),
    /// An object violates its own invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// A macro-tile or field could not be decoded.
    #[error("format error: {0}")]
    Format(String),
    /// A search ran out of its node budget before reaching a verdict.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// Greedy extension of a configuration got stuck.
    #[error("extension error at length {length}: {reason}")]
    Extension { length: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
