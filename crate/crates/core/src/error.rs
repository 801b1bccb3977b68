use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency grid [{grid_min}, {grid_max}] does not contain the required support [{need_min}, {need_max}]")]
    GridTooNarrow {
        grid_min: f64,
        grid_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("grid is too coarse: {0}")]
    GridTooCoarse(String),

    #[error("amplitude input is empty")]
    EmptyInput,

    #[error("amplitude is identically zero")]
    AllZeroAmplitude,

    #[error("sample grid is not uniform at row {row}")]
    NonUniformGrid { row: usize },

    #[error("box rest frequency {rest} must exceed the largest photon frequency {max_omega}")]
    RestFrequencyTooSmall { rest: f64, max_omega: f64 },

    #[error("state has already been measured")]
    AlreadyCollapsed,

    #[error("state has not been measured yet")]
    NotCollapsed,

    #[error("posterior amplitude underflowed to zero (resolution {resolution} is far outside the support)")]
    PosteriorUnderflow { resolution: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("too few trials: {got} < {min}")]
    TooFewTrials { got: usize, min: usize },

    #[error("weak-field guard violated: |g x| / c^2 = {ratio:e} >= {limit}")]
    WeakFieldViolated { ratio: f64, limit: f64 },

    #[error("internal numerical error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
