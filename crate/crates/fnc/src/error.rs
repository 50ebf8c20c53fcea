use thiserror::Error;

/// Errors from codecs, trainers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("unknown container method byte {0}")]
    UnknownMethod(u8),

    #[error("payload length mismatch: header declares {declared} bytes, found {actual}")]
    PayloadLength { declared: u64, actual: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("map system is not contractive (factor {factor})")]
    NotContractive { factor: f64 },

    #[error("series too short: {len} samples, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("not enough data points: {len}, need at least {min}")]
    InsufficientData { len: usize, min: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cost became non-finite at iteration {step} (step size too large?)")]
    NonFiniteCost { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
