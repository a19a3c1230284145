use thiserror::Error;

/// Errors raised by ring arithmetic, module constructions and the harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring specification: {0}")]
    InvalidRing(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not square-zero: entry ({row}, {col}) of delta^2 is {value}")]
    NotSquareZero {
        row: usize,
        col: usize,
        value: String,
    },
    #[error(
        "grading mismatch: entry ({row}, {col}) = {value} is not homogeneous of degree {expected}"
    )]
    GradingMismatch {
        row: usize,
        col: usize,
        value: String,
        expected: i64,
    },
    #[error("not a morphism: delta_E * phi != phi * delta_D at entry ({row}, {col})")]
    NotAMorphism { row: usize, col: usize },
    #[error("graded homology requires an explicit cutoff")]
    CutoffMissing,
    #[error("cutoff {cutoff} is below the maximal generator degree {max_degree}")]
    CutoffTooSmall { cutoff: i64, max_degree: i64 },
    #[error("matrix is not strictly upper triangular: entry ({row}, {col}) is nonzero")]
    NotStrictlyUpperTriangular { row: usize, col: usize },
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("determinantal rank {0} exceeds 1")]
    RankTooLarge(usize),
    #[error("not a monomial: {0}")]
    NotMonomial(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("spectral sequence has not stabilized: {0}")]
    NotStabilized(String),
    #[error("annihilator verification failed for {0}")]
    AnnihilatorNotVerified(String),
}

pub type Result<T> = std::result::Result<T, Error>;
