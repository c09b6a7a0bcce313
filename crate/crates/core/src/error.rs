use thiserror::Error;

/// Index of a cell on the padded grid; `(i, 0)` in one dimension.
pub type CellIndex = (isize, isize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("primitive recovery failed in cell {cell:?}: {reason}")]
    Recovery { cell: CellIndex, reason: String },

    #[error("space-time predictor failed in cell {cell:?}: {reason}")]
    Predictor { cell: CellIndex, reason: String },

    #[error("non-finite value in cell {cell:?} at step {step}")]
    NonFinite { cell: CellIndex, step: u64 },

    #[error("inadmissible state in cell {cell:?}: {reason}")]
    Inadmissible { cell: CellIndex, reason: String },

    #[error("numerical flux failed: {0}")]
    Flux(String),

    #[error("exact Riemann solver: {0}")]
    Riemann(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status of the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Parse { .. } | Self::Riemann(_) => 2,
            Self::Recovery { .. } | Self::Inadmissible { .. } => 3,
            Self::Predictor { .. } | Self::Flux(_) => 4,
            Self::NonFinite { .. } => 5,
            Self::Io(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Failure of the conserved to primitive map for a single state.
#[derive(Debug, Clone, Error)]
#[error("{reason}")]
pub struct RecoveryFailure {
    pub reason: String,
}

impl RecoveryFailure {
    pub fn new(reason: impl Into<String>) -> Self {
        Self {
            reason: reason.into(),
        }
    }
}
