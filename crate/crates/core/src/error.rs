use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range arguments.
    #[error("input error: {0}")]
    Input(String),
    /// A standing assumption on the domain is violated (e.g. disconnected closure).
    #[error("domain error: {0}")]
    Domain(String),
    /// The constraint set of a variational problem is empty.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A matrix expected to be positive definite is not.
    #[error("singular system: {0}")]
    Singular(String),
    #[error("enumeration budget exceeded: {what} needs universe {size}, limit is {limit}")]
    Budget { what: String, size: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
