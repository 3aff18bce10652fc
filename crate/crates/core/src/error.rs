use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("agent index {index} out of range for {n} agents")]
    AgentOutOfRange { index: usize, n: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("node {node} has odd degree {degree}")]
    OddDegree { node: usize, degree: usize },

    #[error("could not build a connected review graph after {0} attempts")]
    ConstructionFailed(usize),

    #[error("rankings are not permutations of the same items")]
    MismatchedItems,

    #[error("invalid ranking for reviewer {reviewer}: {reason}")]
    InvalidRanking { reviewer: usize, reason: String },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("correlation is undefined for constant input")]
    ConstantInput,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
