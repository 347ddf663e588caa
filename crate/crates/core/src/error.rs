use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate evidence: every segment count has zero posterior mass")]
    DegenerateEvidence,

    #[error("integration grid of {points} points exceeds the {max} point limit; supply an explicit noise scale")]
    GridTooLarge { points: usize, max: usize },

    #[error("exhaustive enumeration is limited to n <= {max}; got n = {n}")]
    EnumerationTooLarge { n: usize, max: usize },
}
