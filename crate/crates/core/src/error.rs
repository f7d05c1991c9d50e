use thiserror::Error;

/// Errors raised by the GFDM core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GfdmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular characteristic matrix: zero entry at (k={k}, m={m})")]
    SingularMatrix { k: usize, m: usize },

    #[error("channel has a spectral null at bin {bin}")]
    ChannelNull { bin: usize },

    #[error(
        "no exact low-complexity MMSE factorization: subsymbol {m} has non-constant |G| in k and non-constant |C| in k (use the approximated MMSE receiver)"
    )]
    LowComplexityUnavailable { m: usize },

    #[error("MMSE receivers require every subcarrier and subsymbol to be allocated")]
    PartialAllocation,

    #[error("dense GFDM matrix of size {d}x{d} exceeds the limit {limit}")]
    TooLarge { d: usize, limit: usize },

    #[error("frequency-domain filter has {nonzeros} nonzero bins, sparsity allows {limit}")]
    SparsityViolation { nonzeros: usize, limit: usize },

    #[error("deep-fade rejection gave up after {attempts} consecutive rejections")]
    RejectionLimit { attempts: u64 },

    #[error("unknown identifier `{0}`")]
    UnknownName(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = GfdmError> = std::result::Result<T, E>;

impl From<std::io::Error> for GfdmError {
    fn from(err: std::io::Error) -> Self {
        GfdmError::Io(err.to_string())
    }
}

impl From<csv::Error> for GfdmError {
    fn from(err: csv::Error) -> Self {
        GfdmError::Io(err.to_string())
    }
}
