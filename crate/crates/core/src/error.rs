use thiserror::Error;

/// Errors produced by state construction, Fisher-information functionals and
/// the campaign harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} amplitudes/entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("direction is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("{got} qubits exceeds the configured cap of {cap}")]
    TooManyQubits { got: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("likelihood is flat over the estimation grid")]
    FlatLikelihood,

    #[error("rejection budget of {0} draws exhausted")]
    RejectionExhausted(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
