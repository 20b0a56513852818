use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ring configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("full-space evolution limited to N <= {max}, got N = {n}")]
    SizeGuard { n: usize, max: usize },

    #[error("Bessel series not converged for order up to {max_order} at beta = {beta}")]
    Truncation { beta: f64, max_order: usize },

    #[error("transition magnitude {0} exceeds 1 beyond rounding")]
    Unphysical(f64),

    #[error("empty search window: {0}")]
    EmptyWindow(String),

    #[error("duplicate site {0} in party list")]
    DuplicateSite(usize),
}
