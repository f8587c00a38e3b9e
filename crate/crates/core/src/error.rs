use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("factor index {index} out of range for a space with {len} factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("factor {slot} is not a Fock mode")]
    NotAFockMode { slot: usize },

    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidQuditDimension(usize),

    #[error("Fock truncation must be at least 1, got {0}")]
    InvalidTruncation(usize),

    #[error("index {index} out of range 0..{bound}")]
    ValueOutOfRange { index: usize, bound: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "eigensolver did not converge after {iterations} restarts: residual {achieved:.3e} > {required:.3e}"
    )]
    NotConverged {
        achieved: f64,
        required: f64,
        iterations: usize,
    },

    #[error("space does not match model {model}: {reason}")]
    SpaceModelMismatch { model: String, reason: String },

    #[error("operation `{operation}` is not supported for model {model}")]
    UnsupportedModel { model: String, operation: String },

    #[error("operator is not of order three (max |P^3 - I| = {deviation:.3e})")]
    NotOrderThree { deviation: f64 },

    #[error(
        "truncation N_max = {found} too small for |alpha| = {alpha:.4}: need N_max >= {required}"
    )]
    TruncationGuard {
        alpha: f64,
        required: usize,
        found: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
}
