use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("zero matrix has no positive eigenvalue")]
    ZeroMatrix,
    #[error("inconsistent system: least-squares residual {residual:e} exceeds tolerance {tolerance:e}")]
    InconsistentSystem { residual: f64, tolerance: f64 },
    #[error("zero row {row}: row-norm probabilities undefined")]
    ZeroRow { row: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("analysis unavailable for this sampler: {0}")]
    AnalysisUnavailable(&'static str),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
