use thiserror::Error;

/// Errors raised by measures, partitions and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("level {level} out of range (valid: {min}..={max})")]
    LevelOutOfRange { level: usize, min: usize, max: usize },

    #[error("value {0} lies outside the support")]
    OutOfSupport(f64),

    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("symbol {symbol} out of range for alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: u64, alphabet_size: u64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("expected {expected} weights, got {got}")]
    WeightCountMismatch { expected: usize, got: usize },

    #[error("reference measure does not fit the partition: {0}")]
    IncompatibleMeasure(String),

    #[error("every level assigns zero density to the observed data")]
    DegenerateMixture,

    #[error("sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("at least one sample is required")]
    EmptySample,

    #[error("prior probability must lie strictly between 0 and 1, got {0}")]
    InvalidPrior(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
