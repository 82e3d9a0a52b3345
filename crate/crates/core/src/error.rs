use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty ensemble: collective spin operators need at least one particle")]
    EmptyEnsemble,

    #[error("squeezing frame undefined for fewer than two particles (n = {0})")]
    FrameUndefined(usize),

    #[error("{what} out of range: {value} not in [0, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        max: i64,
    },

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("outcome unresolvable: zero-probability branch (n_a = {n_a}, l_a = {l_a}, p = {prob:e})")]
    ZeroProbability { n_a: usize, l_a: usize, prob: f64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("no sensitivity: Fisher information {0} is not positive")]
    NoSensitivity(f64),

    #[error("empty mixture: no block carries weight")]
    EmptyMixture,

    #[error("grid under-resolves band limit: need n_theta >= {min_theta} and n_phi >= {min_phi}, got {n_theta} x {n_phi}")]
    GridUnderResolved {
        min_theta: usize,
        min_phi: usize,
        n_theta: usize,
        n_phi: usize,
    },

    #[error("not a half-integer: {0}")]
    NotHalfInteger(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
