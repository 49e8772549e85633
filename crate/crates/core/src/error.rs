use thiserror::Error;

/// Every failure mode the library reports. Variants map onto the exit-code
/// classes of the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("outside evaluation regime: {0}")]
    Regime(String),

    #[error("grid too coarse: {reason} (need at least M = {required_samples})")]
    Resolution { reason: String, required_samples: usize },

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Validation { field, reason: reason.into() }
}
