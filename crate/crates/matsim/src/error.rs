use thiserror::Error;

/// Failures of the matrix simulation.
#[derive(Debug, Error)]
pub enum MatsimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("corner spectrum leaves [0, 1] by {excess:e}; unitarity is broken upstream")]
    Spectrum { excess: f64 },
    #[error("QR sampling kept producing rank-deficient Gaussian matrices")]
    RankDeficient,
    #[error("{aborted} of {trials} trials aborted (limit 1%); first failure: {first}")]
    TooManyAborts {
        aborted: usize,
        trials: usize,
        first: String,
    },
    #[error("diagnostic refused: {0}")]
    Diagnostic(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Core(#[from] free_jacobi_core::Error),
}

pub type Result<T> = std::result::Result<T, MatsimError>;
