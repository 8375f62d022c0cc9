use thiserror::Error;

/// Failures raised by the geometry, decomposition and series code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("generators are linearly dependent (|det| = {abs_det:e})")]
    RankDeficient { abs_det: f64 },
    #[error("generator {index} is the zero vector")]
    ZeroVector { index: usize },
    #[error("cone is not full-dimensional (rank {rank} in dimension {dim})")]
    NotFullDim { rank: usize, dim: usize },
    #[error("cone has no nonzero generators")]
    EmptyCone,
    #[error("every generator lies in the hyperplane")]
    DegenerateHyperplane,
    #[error("every generator is orthogonal to the last one")]
    AllOrthogonal,
    #[error("associated matrix is not positive definite; the series diverges")]
    NotPositiveDefinite,
    #[error("term budget exhausted after {terms} terms (tail estimate {tail:e})")]
    BudgetExceeded { terms: u64, tail: f64 },
    #[error("non-finite series term")]
    NonFiniteTerm,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("wrong dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("parts are not mutually orthogonal (cross inner product {overlap:e})")]
    NotOrthogonal { overlap: f64 },
    #[error("recursion depth exceeded")]
    RecursionDepth,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
