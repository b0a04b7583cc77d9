use thiserror::Error;

/// Errors raised while validating inputs or running the estimator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: no states given")]
    EmptyInput,
    #[error("sample path too short: {len} state(s), need at least 2")]
    PathTooShort { len: usize },
    #[error("state {state} at position {position} is outside [0, {num_states})")]
    IndexOutOfRange {
        state: i64,
        position: usize,
        num_states: usize,
    },
    #[error("need at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not row-stochastic: {0}")]
    NotStochastic(String),
    #[error("vector is not a probability distribution: {0}")]
    NotProbability(String),
    #[error("linear system is singular (pivot {pivot:e} in column {column})")]
    SingularSystem { column: usize, pivot: f64 },
    #[error("stationary probability of state {0} is zero")]
    ZeroStationaryEntry(usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("need at least 2 eigenvalues, got {0}")]
    TooFewEigenvalues(usize),
    #[error("confidence parameter delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("invalid transition rates: {0}")]
    InvalidRates(String),
    #[error("weight graph is disconnected or malformed: {0}")]
    DisconnectedGraph(String),
    #[error("chain is not reversible (max detailed-balance residual {0:e})")]
    NotReversible(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::ZeroStationaryEntry(_)
                | Error::NotSymmetric(_)
                | Error::TooFewEigenvalues(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
