use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("geometry violation: {0}")]
    GeometryViolation(String),
    #[error("region is not symmetric under rotation by 120 degrees")]
    NotSymmetric,
    #[error("region too large: {cells} cells exceeds cap {cap}")]
    RegionTooLarge { cells: usize, cap: usize },
    #[error("pole: {0}")]
    Pole(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division inside an exact algorithm: {0}")]
    InternalDivision(String),
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(String),
    #[error("matrix variant parameters: {0}")]
    VariantParameter(String),
    #[error("parity: {0}")]
    Parity(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("not an integer: {0}")]
    NotIntegral(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
