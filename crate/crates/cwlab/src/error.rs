use thiserror::Error;

/// Library-wide error type. The CLI maps these onto exit codes: invalid
/// input, configuration and IO problems are code 1, regime and numeric
/// precondition failures are code 2.
#[derive(Debug, Error)]
pub enum CwError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix required to be positive definite failed its factorization.
    /// `leading_minor` is the 1-based index of the first non-positive pivot.
    #[error("matrix is not positive definite (leading minor {leading_minor})")]
    NotPositiveDefinite { leading_minor: usize },

    #[error("coupling matrix is singular")]
    SingularCoupling,

    /// An operation that only makes sense in the high-temperature regime was
    /// asked for outside of it.
    #[error("outside the high-temperature regime: {0}")]
    OutsideRegime(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Normalization box expansion hit its hard cap without the integrand
    /// decaying; the mixing density does not concentrate.
    #[error("quadrature box diverged: {0}")]
    Divergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CwError {
    /// Process exit code the CLI maps this error onto: 1 for input,
    /// configuration and IO problems; 2 for regime and numeric
    /// precondition failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CwError::InvalidInput(_) | CwError::Config(_) | CwError::Io(_) => 1,
            CwError::NotPositiveDefinite { .. }
            | CwError::SingularCoupling
            | CwError::OutsideRegime(_)
            | CwError::ResourceLimit(_)
            | CwError::Divergence(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CwError>;
