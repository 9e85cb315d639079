use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("moment diverges: {0}")]
    DivergentMoment(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot cancel {cancelled} interferers with {dim} antennas")]
    TooManyCancelled { cancelled: usize, dim: usize },

    #[error("projection onto the nullspace is degenerate")]
    DegenerateProjection,

    #[error("sample covariance from {snapshots} snapshots is singular for {dim} antennas")]
    SingularSampleCovariance { snapshots: usize, dim: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("root bracket not found after {0} expansions")]
    BracketFailure(usize),

    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),
}
