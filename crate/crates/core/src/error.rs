use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("digit out of range: {0} (expected 0-9)")]
    DigitOutOfRange(u32),

    #[error("digit string has length {0}, expected 12")]
    BadDigitCount(usize),

    #[error("bar sequence has length {0}, expected 95")]
    BadBarCount(usize),

    #[error("sparse code has length {0}, expected 123")]
    BadSparseLength(usize),

    #[error("sparse code is malformed in block {block}: {reason}")]
    MalformedSparseCode { block: usize, reason: String },

    #[error("oversampling ratio must be >= 1, got {0}")]
    BadOversampling(usize),

    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("sigma must be nonnegative, got {0}")]
    NegativeSigma(f64),

    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),

    #[error("signal length {signal} does not match grid sample count {grid}")]
    GridMismatch { signal: usize, grid: usize },

    #[error("relative noise requested on an all-zero signal")]
    ZeroSignalRelativeNoise,

    #[error("noise level must be nonnegative, got {0}")]
    NegativeNoiseLevel(f64),

    #[error("invalid signal file {path}: {reason}")]
    BadSignalFile { path: String, reason: String },

    #[error("invalid range expression {0:?} (expected start:stop:step)")]
    BadRangeExpr(String),

    #[error("phase diagram spec invalid: {0}")]
    BadPhaseSpec(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
