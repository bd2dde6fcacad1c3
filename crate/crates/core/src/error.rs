use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the evaluators and their building blocks.
#[derive(Debug, Error)]
pub enum MdlError {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The point (or a sequence) lies outside the region where the requested
    /// method is proven to apply.
    #[error("region error: {0}")]
    Region(String),

    /// The requested tolerance could not be reached within the cost ceiling.
    #[error("budget exhausted: {message}")]
    Budget {
        message: String,
        best: Option<BestEffort>,
    },

    #[error("unsupported rank r={0}: {1}")]
    UnsupportedRank(usize, &'static str),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed sequence file: {0}")]
    Format(String),
}

/// Best estimate available when an evaluation ran out of budget.
#[derive(Debug, Clone, Copy)]
pub struct BestEffort {
    pub value: Complex64,
    pub error_estimate: f64,
}

pub type Result<T> = std::result::Result<T, MdlError>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(MdlError::Argument(msg.into()))
}
