use thiserror::Error;

/// Failures raised by the numerical routines and the file-format readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "matrix is not positive semidefinite (eigenvalue {eigenvalue:e}, allowed floor {floor:e})"
    )]
    NotPositive { eigenvalue: f64, floor: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported dimension d = {d}: {reason}")]
    UnsupportedDimension { d: usize, reason: String },

    #[error("unsupported measurement family: {0}")]
    UnsupportedFamily(String),

    #[error("family is not a certified 2-design (defect {defect:e} exceeds {tolerance:e})")]
    DesignDefect { defect: f64, tolerance: f64 },

    #[error("infinite divergence: support overlap {overlap:e} is at or below {threshold:e}")]
    InfiniteDivergence { overlap: f64, threshold: f64 },

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
