use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A mathematical precondition was violated (non-positive mean, empty
    /// sample, unstable queue handed to a stable-only operation, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration is structurally valid but violates an invariant.
    /// One entry per violated invariant so the operator sees all of them.
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    /// An iterative fit did not converge.
    #[error("fit did not converge: {0}")]
    NonConvergence(String),

    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(violations: Vec<String>) -> Self {
        Error::Config(violations)
    }
}
