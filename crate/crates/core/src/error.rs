use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("analytic extension overflow guard: |q| * extent = {product:.3e} exceeds 700 (q = {q})")]
    ExtensionOverflow { q: f64, product: f64 },

    #[error("zero total intensity")]
    ZeroIntensity,

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("insufficient modulus support: {valid} valid bins")]
    InsufficientSupport { valid: usize },

    #[error("negative modulus or intensity at bin {index}: {value}")]
    NegativeModulus { index: usize, value: f64 },

    #[error("undefined weak value: pre- and post-selected states are orthogonal (overlap {overlap:.3e})")]
    UndefinedWeakValue { overlap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("weak-measurement regime violated: |eps| * dp / |theta| = {ratio:.3e} must be < 1")]
    RegimeViolation { ratio: f64 },

    #[error("post-selection null: {0}")]
    PostSelectionNull(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("malformed row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("non-uniform grid: spacing deviates by {deviation:.3e} (relative) at row {row}")]
    NonUniformGrid { row: usize, deviation: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
