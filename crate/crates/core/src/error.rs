use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("state spaces do not match: {0}")]
    SpaceMismatch(String),

    #[error("invalid index subset: {0}")]
    InvalidSubset(String),

    #[error("invalid margin family: {0}")]
    InvalidFamily(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid block split: {0}")]
    InvalidSplit(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what} requires {required} but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        cap: u128,
        required: u128,
    },

    #[error("exact (rational) weights are required for {0}")]
    ExactRequired(&'static str),

    #[error("point is not strictly positive at state {0}")]
    NotInterior(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input at `{field}`: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
