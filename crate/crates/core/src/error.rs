use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge or a root bracket was invalid.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A result cannot be certified at the requested precision.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// The matrix simulation lost positive definiteness.
    #[error("numerical breakdown in trial {trial}, step {step}: {detail}")]
    Numerical {
        trial: usize,
        step: usize,
        detail: String,
    },

    /// `λ^k` would overflow the floating-point range used for aggregation.
    #[error("moment order {k} overflows (max |log λ| = {max_abs_log})")]
    OverflowGuard { k: u32, max_abs_log: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidConfig(_))
    }
}
