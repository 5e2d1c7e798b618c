use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The grid does not resolve the coherent-state content of the truncation.
    #[error("grid too coarse / too narrow: {0}")]
    GridTooCoarse(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("displacement exceeds truncation validity: |(a,b)|_inf = {norm} > {limit}")]
    DisplacementOutOfRange { norm: f64, limit: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("group element is not commensurate with the grid step {step}: {detail}")]
    NotCommensurate { step: f64, detail: String },

    #[error("under-determined configuration: {points} grid points < {unknowns} unknowns")]
    Underdetermined { points: usize, unknowns: usize },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
