use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity {arity} exceeds the cap of {cap}")]
    ArityOverflow { arity: usize, cap: usize },

    #[error("inner product needs an even arity, got {0}")]
    OddInnerProductArity(usize),

    #[error("input has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(&'static str),

    #[error("symmetric polynomial of degree {degree} does not fit a support of size {support}")]
    DegreeExceedsSupport { degree: usize, support: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("witness failed exact verification: {0}")]
    Verification(String),

    #[error("polynomial is not amplifiable: {0}")]
    NotAmplifiable(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
