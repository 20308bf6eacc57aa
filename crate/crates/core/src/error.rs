use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigendecomposition did not converge (dimension {dim}, Frobenius norm {norm:e})")]
    NonConvergence { dim: usize, norm: f64 },

    #[error("eigenvalue {value:e} at index {index} is at or below the floor {floor:e}")]
    Domain {
        index: usize,
        value: f64,
        floor: f64,
    },

    #[error("matrix is not positive definite: smallest eigenvalue {0:e}")]
    NotPositiveDefinite(f64),

    #[error("invalid eigenvalue range ({lo}, {hi}): {reason}")]
    InvalidRange {
        lo: f64,
        hi: f64,
        reason: &'static str,
    },

    #[error("argument {0} is outside (0, inf)")]
    NonPositiveArgument(f64),

    #[error("function evaluated to a non-finite value at x = {0}")]
    NonFinite(f64),

    #[error("invalid function tag {tag:?}: {reason}")]
    InvalidTag { tag: String, reason: String },

    #[error("invalid positive map: {0}")]
    InvalidMap(String),

    #[error("strict positivity certificate failed: min eigenvalue of the unit image is {0:e}")]
    Certificate(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("coincident points {0} and {1}")]
    CoincidentPoints(f64, f64),

    #[error(
        "solver hit the iteration cap ({iterations}) with oracle gap {gap:e} and gradient norm {grad_norm:e}"
    )]
    SolverNonConvergence {
        iterations: usize,
        gap: f64,
        grad_norm: f64,
    },

    #[error("scalar conjugate infimum at t = {0} is attained at the domain boundary")]
    BoundaryInfimum(f64),

    #[error("malformed witness: {0}")]
    Witness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
