use thiserror::Error;

/// Errors raised by estimators, regularizers, tuning and the simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LrcError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("difference sequence violates {constraint}: got {value:e} (tolerance {tol:e})")]
    Normalization {
        constraint: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("series of length {n} too short: need more than {needed} observations")]
    InsufficientLength { n: usize, needed: usize },

    #[error("lag {lag} out of range: must be below {limit}")]
    Lag { lag: i64, limit: usize },

    #[error("inconsistent decomposition: {0}")]
    Consistency(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        /// Last iterate, when an iteration stalls.
        last_estimate: Option<f64>,
    },

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },
}

/// Coarse error class, used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Parse,
    Numerical,
}

impl LrcError {
    pub fn class(&self) -> ErrorClass {
        match self {
            LrcError::Parse { .. } => ErrorClass::Parse,
            LrcError::Numerical { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Config,
        }
    }

    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        LrcError::Numerical {
            message: message.into(),
            last_estimate: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, LrcError>;
