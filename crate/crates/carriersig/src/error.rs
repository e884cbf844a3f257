//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by ingestion, signature computation, matching and the
/// statistical model.
#[derive(Debug, Error)]
pub enum Error {
    /// A measurement carried a non-finite or otherwise unusable value.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// Not enough data for the requested computation (fewer than two
    /// measurements, fewer than two full periods, ...).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A parameter was outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Vector or matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The input is degenerate for the requested encoding.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The singular value decomposition did not converge.
    #[error("decomposition failed: {0}")]
    Decomposition(String),

    /// A carrier id was referenced but never defined.
    #[error("unknown carrier: {0}")]
    UnknownCarrier(String),

    /// A CSV or config file could not be parsed.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// A distribution was requested over an empty record set.
    #[error("empty distribution: {0}")]
    EmptyDistribution(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class. Code 2 is left to the
    /// argument parser; each class gets its own code so scripts can react
    /// to, say, insufficient data differently from a malformed file.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_) => 3,
            Error::InsufficientData(_) => 4,
            Error::UnknownCarrier(_) => 5,
            Error::InvalidParameter(_)
            | Error::InvalidMeasurement(_)
            | Error::ShapeMismatch(_)
            | Error::DegenerateInput(_) => 6,
            Error::Decomposition(_) => 7,
            Error::EmptyDistribution(_) => 8,
            Error::Io(_) => 9,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
