use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A recurrence produced a NaN or infinite value.
    #[error("state became non-finite at step {step}")]
    Divergence { step: usize },

    /// The random adjacency matrix has (numerically) zero spectral radius and
    /// cannot be rescaled.
    #[error("adjacency matrix is degenerate (raw spectral radius {radius:e})")]
    DegenerateMatrix { radius: f64 },

    #[error("insufficient data: need at least {needed} samples, got {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The normalized error is undefined because the target does not vary.
    #[error("target has zero standard deviation")]
    ZeroVariance,

    #[error("state matrix already carries a bias column")]
    BiasPresent,

    #[error("numerical routine failed to converge: {0}")]
    NoConvergence(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
