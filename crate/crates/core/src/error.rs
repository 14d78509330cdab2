use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("shape with {n} cells exceeds the brute-force limit of {max}")]
    SizeLimit { n: u32, max: u32 },

    #[error("exponent z must be a positive integer, got {0}")]
    InvalidExponent(i64),

    #[error("leading coefficient of the recurrence vanishes at n = {n}")]
    LeadingCoefficientZero { n: u64 },

    #[error("recurrence produced a non-integer value at n = {n}; the operator does not annihilate this sequence")]
    NonIntegral { n: u64 },

    #[error("sequence has no term at n = {n} (stored range {start}..={end})")]
    OutOfRange { n: u64, start: u64, end: i64 },

    #[error("need at least {needed} terms to fit, have {have}")]
    InsufficientTerms { needed: usize, have: usize },

    #[error("unsupported asymptotic type: {0}")]
    UnsupportedAsymptotics(String),

    #[error("degenerate pivot while solving for correction coefficient a_{index}")]
    DegeneratePivot { index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}
