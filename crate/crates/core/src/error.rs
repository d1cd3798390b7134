use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The pair (n, k) is outside the study range.
    #[error("domain error: hypothesis 2 < 2k < n violated (n = {n}, k = {k})")]
    Domain { n: u64, k: u64 },

    #[error("NON_GENERIC: n - r = {0} is an odd integer")]
    NonGeneric(String),

    #[error("OUT_OF_RANGE: {0}")]
    OutOfRange(String),

    #[error("K_ONE_UNSUPPORTED: the length matches k = 1 (projective space case)")]
    KOneUnsupported,

    #[error("K_AT_LEAST_HALF: the length matches k = {k} with 2k >= n = {n}")]
    KAtLeastHalf { n: u64, k: u64 },

    #[error("floor_lg is only defined for positive integers, got {0}")]
    NonPositiveLog(i64),

    #[error("degree {degree} outside 0..={max}")]
    DegreeOutOfRange { degree: u32, max: u32 },

    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: u32, actual: u32 },

    #[error("PHI3 is only defined when B is even and D = 0")]
    FunctionalUnavailable,

    #[error("n = {0} exceeds the supported generator count (n <= 64)")]
    TooManyGenerators(u64),

    #[error("budget guard: {0} (pass --force to override)")]
    Budget(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("certificate: {0}")]
    Certificate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
