use freeform_core::Error as CoreError;

/// Operational failures of the driver; verdicts are never errors.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot construct shape: {0}")]
    Shape(#[source] CoreError),
    #[error("numerical failure: {0}")]
    Numerical(#[source] CoreError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    /// Process exit code: 2 configuration, 3 shape construction, 4 numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) | RunError::Json(_) => 2,
            RunError::Shape(_) => 3,
            RunError::Numerical(_) => 4,
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

pub(crate) fn numerical(e: CoreError) -> RunError {
    RunError::Numerical(e)
}
