use std::path::PathBuf;

use wgi_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, WgiError>;

#[derive(Debug, thiserror::Error)]
pub enum WgiError {
    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Solver { context: String, source: CoreError },

    #[error("{path}: line {line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },

    #[error("data mismatch: {0}")]
    Mismatch(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl WgiError {
    /// Process exit code: 2 config, 3 solver, 4 data.
    pub fn exit_code(&self) -> i32 {
        match self {
            WgiError::Config(_) => 2,
            WgiError::Solver { .. } => 3,
            WgiError::Format { .. } | WgiError::Mismatch(_) | WgiError::Io { .. } => 4,
        }
    }

    pub(crate) fn solver(context: impl Into<String>) -> impl FnOnce(CoreError) -> WgiError {
        let context = context.into();
        move |source| WgiError::Solver { context, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> WgiError {
        let path = path.into();
        move |source| WgiError::Io { path, source }
    }
}
