use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation from identity {0:e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("{requested} iterations exceeds the limit of {limit}")]
    TooManyIterations { requested: u32, limit: u32 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown midpoint channel `{0}` (expected identity, full-dephase or ist)")]
    UnknownChannel(String),

    #[error("a dense matrix over {0} modes exceeds the dense representation limit")]
    TooLargeForDense(usize),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
