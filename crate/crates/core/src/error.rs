use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("state outside the admissible domain: {0}")]
    DomainError(String),
    #[error("root finder failed: {0}")]
    NoRoot(String),
    #[error("wave configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("cell {cell} left the state space at t = {t}")]
    StateSpaceViolation { cell: usize, t: f64 },
    #[error("sonic wave at the interface: {0}")]
    Sonic(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Validation { key: String, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
