use thiserror::Error;

/// Errors raised while building inputs or running a solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmrfError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("covariance diagonal entry {index} is {value}, must be strictly positive")]
    DegenerateCovariance { index: usize, value: f64 },

    #[error("covariance is not positive semidefinite (smallest eigenvalue below -{tolerance:e})")]
    NotPositiveSemidefinite { tolerance: f64 },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("penalty is not symmetric at ({i}, {j})")]
    AsymmetricPenalty { i: usize, j: usize },

    #[error("off-diagonal penalty at ({i}, {j}) is {value}, must be > 0")]
    NonPositiveOffDiagonal { i: usize, j: usize, value: f64 },

    #[error("diagonal penalty at {index} is {value}, must be >= 0")]
    NegativeDiagonalPenalty { index: usize, value: f64 },

    #[error("pair ({i}, {j}) appears in more than one block")]
    OverlappingBlocks { i: usize, j: usize },

    #[error("block {block} has radius {value}, must be > 0")]
    NonPositiveBlockRadius { block: usize, value: f64 },

    #[error("block {block} is empty")]
    EmptyBlock { block: usize },

    #[error("block {block} contains invalid pair ({i}, {j})")]
    InvalidPair { block: usize, i: usize, j: usize },

    #[error("pair ({i}, {j}) is not covered by any block and no default radius was given")]
    UnassignedPair { i: usize, j: usize },

    #[error("group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("groups do not partition the variables: {reason}")]
    NonPartition { reason: String },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("no strictly feasible starting point found")]
    InfeasibleStart,

    #[error("degenerate data: coordinate {index} has zero variance")]
    DegenerateData { index: usize },

    #[error("invalid option {name}: {reason}")]
    InvalidOption { name: &'static str, reason: String },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, GmrfError>;
