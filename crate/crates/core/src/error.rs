use thiserror::Error;

pub type Result<T> = std::result::Result<T, QstError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QstError {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank {rank} outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("state is not pure (rank {rank})")]
    NotPure { rank: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid measurement record: {0}")]
    InvalidRecord(String),

    #[error("invalid basis set: {0}")]
    InvalidBasis(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("problem infeasible: {0}")]
    Infeasible(String),

    #[error("estimate has zero trace and cannot be normalized")]
    ZeroTrace,
}
