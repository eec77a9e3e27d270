use thiserror::Error;

/// Errors raised by the index pipeline, metrics, and rotary kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("degenerate radius")]
    DegenerateRadius,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("text direction must have nonzero norm")]
    ZeroTextDirection,

    #[error("invalid grid {width}x{height}: both sides must be at least 1")]
    InvalidGrid { width: usize, height: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("PTD requires both modalities")]
    MissingModality,

    #[error("scalar distance needs replicated (s,s,s) indices")]
    NotReplicated,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid rotary params: {0}")]
    InvalidParams(String),

    #[error("bad layout segment `{segment}`: {reason}")]
    Layout { segment: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
