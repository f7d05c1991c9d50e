use gfdm_core::GfdmError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] GfdmError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code: 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Io(_) => 2,
            SimError::Numerical(_) => 3,
        }
    }
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Io(std::io::Error::other(e.to_string()))
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
