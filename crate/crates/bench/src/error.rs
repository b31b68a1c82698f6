use thiserror::Error;

/// Errors of the experiment harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown suite `{name}`; available suites: {}", available.join(", "))]
    UnknownSuite { name: String, available: Vec<&'static str> },

    #[error("insufficient data for a rate fit: {usable} usable rows, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error(transparent)]
    Core(#[from] ckit_core::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("thread pool error: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl BenchError {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        BenchError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
