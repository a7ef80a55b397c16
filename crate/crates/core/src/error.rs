use thiserror::Error;

pub type Result<T> = std::result::Result<T, DriftError>;

#[derive(Debug, Error)]
pub enum DriftError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stability rejection budget exhausted after {attempts} attempts")]
    StabilityBudgetExhausted { attempts: usize },

    #[error("graph generation rejection budget exhausted after {attempts} attempts")]
    GraphBudgetExhausted { attempts: usize },

    #[error("matrix is unstable: eigenvalue with non-negative real part detected")]
    Unstable,

    #[error("spectral norm of I + eta*Theta is {sigma_max} >= 1; discrete model has no stationary state")]
    DiscreteUnstable { sigma_max: f64 },

    #[error("singular linear system in {0}")]
    SingularSystem(String),

    #[error("Cholesky factorization failed: matrix not positive definite")]
    NotPositiveDefinite,

    #[error("non-finite state at step {step}; simulation overflowed")]
    Overflow { step: usize },

    #[error("coincident connected masses on edge ({i},{j}): spring force undefined")]
    CoincidentMasses { i: usize, j: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty support for row {row}: assumption report is degenerate")]
    EmptySupport { row: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
