use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field elements belong to different fields (q={left} vs q={right})")]
    MismatchedFields { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{0} is not a prime in the supported range")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("word is not a codeword of this code")]
    NotACodeword,
    #[error("{what} has {size} elements, above the enumeration cap {cap}")]
    TooLargeToEnumerate {
        what: &'static str,
        size: String,
        cap: u128,
    },
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("ordinal {ordinal} out of range for challenge space of size {gamma}")]
    OrdinalOutOfRange { ordinal: u128, gamma: u128 },
    #[error("invalid challenge: {0}")]
    InvalidChallenge(String),
    #[error("response shapes differ")]
    ShapeMismatch,
    #[error("invalid prover parameters: {0}")]
    InvalidParams(String),
    #[error("verification oracle is inconsistent with the prover's view (M, S)")]
    OracleInconsistent,
    #[error("pair store exhausted: requested {requested}, {remaining} remaining")]
    StoreExhausted { requested: usize, remaining: usize },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("remote error 0x{code:02x}: {message}")]
    Remote { code: u8, message: String },
    #[error("connection failed after {answered} answered challenges: {message}")]
    Connection { message: String, answered: usize },
    #[error("malformed file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn too_large(what: &'static str, size: impl ToString, cap: u128) -> Error {
    Error::TooLargeToEnumerate {
        what,
        size: size.to_string(),
        cap,
    }
}
