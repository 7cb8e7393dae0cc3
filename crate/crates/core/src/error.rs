use thiserror::Error;

/// Errors raised across the witness toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("local operator is degenerate: output norm {0:e}")]
    DegenerateOperator(f64),

    #[error("family parameters give a zero vector (norm {0:e})")]
    DegenerateFamily(f64),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("records are not informationally complete: operator rank {rank} < {required}")]
    NotInformationallyComplete { rank: usize, required: usize },

    #[error("spectrum violates the polygon inequalities at parties {0:?}")]
    MarginalInfeasible(Vec<usize>),

    #[error("purity {0} is not above 1/2; the noise bound does not apply")]
    BoundInapplicable(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unreliable estimate: {aborted} of {trials} Monte Carlo trials aborted")]
    UnreliableEstimate { aborted: usize, trials: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
