use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("malformed sweep file {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Core(#[from] floquet_core::FloquetError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SweepError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Usage(_) => 2,
            _ => 1,
        }
    }
}
