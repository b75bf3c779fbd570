use std::path::PathBuf;

use qcool::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} validation check(s) failed")]
    ChecksFailed(usize),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

impl ExperimentError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        ExperimentError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for a degenerate
    /// estimate, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config { .. } => 2,
            ExperimentError::Core(CoreError::DegenerateRatio { .. }) => 3,
            ExperimentError::Core(
                CoreError::InvalidArgument(_)
                | CoreError::Parse { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::DimensionOverflow { .. }
                | CoreError::NonRealizable { .. }
                | CoreError::EmptyObservable,
            ) => 2,
            _ => 1,
        }
    }
}

/// Attaches a config path to core errors raised while resolving that field.
pub(crate) trait AtPath<T> {
    fn at(self, path: &str) -> Result<T>;
}

impl<T> AtPath<T> for std::result::Result<T, CoreError> {
    fn at(self, path: &str) -> Result<T> {
        self.map_err(|e| ExperimentError::config(path, e.to_string()))
    }
}
