use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid edge {{{0}, {1}}} in a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("flow of value {requested} is infeasible (max flow {max_flow})")]
    Infeasible { requested: usize, max_flow: usize },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("malformed results file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::InvalidEdge(..) | Error::Domain(_)
        )
    }
}
