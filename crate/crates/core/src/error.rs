use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level mismatch: function has {got} values, graph at level {level} has {expected}")]
    LevelMismatch {
        level: usize,
        expected: usize,
        got: usize,
    },

    #[error("eigenvalue {value} is forbidden")]
    Forbidden { value: f64 },

    #[error("{what} needs {requested}, budget is {limit}")]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, VsError>;

pub(crate) fn invalid(msg: impl Into<String>) -> VsError {
    VsError::InvalidParameter(msg.into())
}
