use thiserror::Error;

/// Errors raised by construction and analysis routines.
///
/// Verification failures are not errors: they are reported as failed
/// [`CheckRecord`](crate::report::CheckRecord)s inside a certificate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
