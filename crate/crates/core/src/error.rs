use thiserror::Error;

/// Errors raised by the numeric core, kernels and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric (entry ({row}, {col}) differs by {diff})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("series has zero variance")]
    ConstantSeries,

    #[error("series length {len} too short for {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is {distance} off the proposal ray")]
    OffRay { distance: f64 },

    #[error("degenerate direction: anchor coincides with mode point")]
    DegenerateDirection,

    #[error("all trial weights are zero")]
    StuckTrials,

    #[error("lambda has a zero denominator")]
    DegenerateWeight,

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("invalid sampler configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
