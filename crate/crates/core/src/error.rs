use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is singular to working precision (sigma_min = {sigma_min:e}, threshold = {threshold:e})")]
    Singular { sigma_min: f64, threshold: f64 },

    #[error("frequency {z} is outside the analyticity half-plane Re z > {bound}")]
    Domain { z: Complex64, bound: f64 },

    #[error("law is unbounded on the requested region: {0}")]
    Unbounded(String),

    #[error("weighted norm diverges: weight {weight} is not below the slowest decay rate {rate}")]
    Divergent { weight: f64, rate: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A stability condition could not be established. `condition` names the
    /// violated requirement, `detail` carries the numbers.
    #[error("not certified ({condition}): {detail}")]
    NotCertified { condition: String, detail: String },

    /// The resolvent was found singular inside a region that was claimed stable.
    #[error("counterexample: symbol + A is singular at z = {z}")]
    Counterexample { z: Complex64 },

    #[error("time stepping failed: {0}")]
    Solver(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn not_certified(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::NotCertified {
            condition: condition.into(),
            detail: detail.into(),
        }
    }
}
