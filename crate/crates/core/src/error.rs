use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),
    #[error("pattern `{0}` is not a bit string of the requested length")]
    InvalidPattern(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("pauli operator `{0}` does not square to the identity")]
    NotInvolutory(String),
    #[error("invalid pauli string `{0}`")]
    InvalidPauli(String),
    #[error("projection outcome must be +1 or -1, got {0}")]
    InvalidOutcome(i8),
    #[error("unsupported code construction: {0}")]
    UnsupportedCode(String),
    #[error("syndrome {0} is not produced by any Z-type error of this code")]
    InconsistentSyndrome(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("corrected state left the codespace (residual {0:e})")]
    LeftCodespace(f64),
    #[error("branch probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("trivial syndrome has zero probability")]
    NothingAccepted,
    #[error("code has no GHZ row structure")]
    NoRowStructure,
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
