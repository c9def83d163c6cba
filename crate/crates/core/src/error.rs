use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchmidtError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("amplitude model is not normalized; normalize first")]
    NotNormalized,

    #[error("normalization integral {0:e} is degenerate")]
    DegenerateNormalization(f64),

    #[error("m_max too small: captured sector probability {coverage} below 1 - {tol:e}")]
    MMaxTooSmall { coverage: f64, tol: f64 },

    #[error("angular resolution exhausted at n_theta = {n_theta} (coverage {coverage})")]
    AngularResolutionExhausted { n_theta: usize, coverage: f64 },

    #[error("sector kernel is not symmetric (max deviation {0:e})")]
    AsymmetricKernel(f64),

    #[error("sector kernel contains non-finite entries")]
    NonFiniteKernel,

    #[error("eigendecomposition failed: {0}")]
    EigenSolver(String),

    #[error("sector kernel m = {0} carries no probability")]
    EmptySector(i32),

    #[error("sector and probability lists are misaligned: {0}")]
    Misaligned(String),

    #[error("spectrum is empty or identically zero")]
    EmptySpectrum,

    #[error("filter removes essentially all amplitude (acceptance {0:e})")]
    FilterRejectsAll(f64),

    #[error("mode (n = {n}, m = {m}) lies beyond the computed truncation")]
    ModeOutOfRange { n: usize, m: i32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SchmidtError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> SchmidtError {
    SchmidtError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
