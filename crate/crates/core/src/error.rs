use thiserror::Error;

/// Errors raised by the regularization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric: entry ({row},{col}) differs from its transpose by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("non-finite sample at abscissa {abscissa}")]
    NonFinite { abscissa: f64 },

    #[error("invariant mass M^2 = {value:e} is not positive at Feynman parameter x = {x}")]
    NonPositiveMass { x: f64, value: f64 },

    #[error("unsupported dimension {0}")]
    Dimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
