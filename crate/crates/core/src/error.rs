use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A table failed validation (negative entry, bad normalization, wrong length).
    #[error("invalid table: {0}")]
    InvalidTable(String),

    /// The operation requires permutation symmetry that the input lacks.
    #[error("not symmetric: {0}")]
    NotSymmetric(String),

    /// Desk-scale size guard tripped.
    #[error("capacity guard: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CoreError::Domain(msg.into()))
}
