use thiserror::Error;

/// Errors produced by the solver, its experiment drivers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite input sample at index {index}")]
    NonFiniteInput { index: usize },

    #[error("spectral input is not Hermitian: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NonHermitianInput { residue: f64, tolerance: f64 },

    /// A time step produced a NaN or infinite coefficient.
    #[error("non-finite state produced by step {step}")]
    NonFiniteState { step: u64 },

    #[error("grid mismatch: expected M_s={expected_samples} N={expected_modes}, found M_s={found_samples} N={found_modes}")]
    GridMismatch {
        expected_samples: usize,
        expected_modes: usize,
        found_samples: usize,
        found_modes: usize,
    },

    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
