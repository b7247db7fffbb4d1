use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A model sits on a regime boundary where no limit theorem applies.
    #[error("boundary regime: {0}")]
    BoundaryRegime(String),

    /// Requested operation is not defined for this model variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Numerical routine failed to meet its tolerance.
    #[error("numerical failure in {context}: {reason}")]
    Numerical { context: &'static str, reason: String },

    /// Simulation failure (e.g. non-finite state).
    #[error("simulation failure: {0}")]
    Simulation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub fn numerical(context: &'static str, reason: impl Into<String>) -> Self {
        Error::Numerical { context, reason: reason.into() }
    }
}
