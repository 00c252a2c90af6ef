use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("times must be strictly increasing (index {index})")]
    NonIncreasingTimes { index: usize },
    #[error("times has {times} entries but values has {values}")]
    LengthMismatch { times: usize, values: usize },
    #[error("non-finite {field} at index {index}")]
    NonFiniteValue { field: &'static str, index: usize },
    #[error("path must contain at least one sample")]
    EmptyPath,
    #[error("no grid point lies in [{a}, {b}]")]
    EmptyWindow { a: f64, b: f64 },
    #[error("invalid window: a={a} must be < b={b}")]
    InvalidWindow { a: f64, b: f64 },
    #[error("parse error at row {row}: {message}")]
    ParseError { row: u64, message: String },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("truncation level must be a finite value >= 0, got {0}")]
    NegativeC(f64),
    #[error("path of length {len} exceeds the limit of {max} for this operation")]
    TooLong { len: usize, max: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("exponent p must be > 0, got {0}")]
    NonPositiveP(f64),
    #[error("exponent p must be >= {min}, got {p}")]
    ExponentTooSmall { p: f64, min: f64 },
    #[error("mesh bound {delta} is smaller than the largest grid gap {max_gap}")]
    MeshTooSmall { delta: f64, max_gap: f64 },
    #[error("path of length {len} exceeds the dynamic-programming limit of {max}")]
    PathTooLong { len: usize, max: usize },
    #[error("window width h must be >= 0, got {0}")]
    NegativeH(f64),
    #[error("paths are not on identical time grids")]
    GridMismatch,
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("continuous-limit experiment requires jump-free (wiener) generators")]
    JumpyGeneratorInContinuousExperiment,
    #[error("invalid experiment config: {0}")]
    InvalidExperiment(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
