use thiserror::Error;

/// Errors surfaced by the solvers, recipes and generators.
///
/// Contract violations (wrong dimensions, nonpositive step sizes, schedules
/// that break a solver's preconditions) are reported here rather than being
/// silently clamped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("recipe violation: {0}")]
    RecipeViolation(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("instance construction failed: {0}")]
    InstanceConstruction(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            })
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
