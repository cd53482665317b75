//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation. The field name is part of the
    /// message so the CLI can point at the offending key.
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit index {index} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("objective value is not finite at the initial point")]
    NonFiniteObjective,

    #[error("insufficient key material: need {needed} bits, have {available}")]
    KeyMaterial { needed: usize, available: usize },

    /// A communication round could not complete (e.g. QKD key shortfall after
    /// all retries). The experiment stops here rather than proceeding with a
    /// partial round.
    #[error("round aborted: {0}")]
    RoundAbort(String),

    #[error("malformed payload: {0}")]
    MalformedPayload(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
