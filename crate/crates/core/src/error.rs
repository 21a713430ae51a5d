use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count must be in 1..=30, got {0}")]
    InvalidQubitCount(u32),

    #[error("encoded value t = {t} is outside [0, {dim})")]
    ValueOutOfRange { t: f64, dim: usize },

    #[error("outcome index {index} is outside [0, {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("operation requires a non-integer encoded value, got t = {0}")]
    IntegerValue(f64),

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("round size must be at least 1")]
    InvalidRoundSize,

    #[error("readout noise must lie in [0, 1], got {0}")]
    NoiseOutOfRange(f64),

    /// The argmax outcome has no neighbour with a nonzero count, so the
    /// floor/ceiling pair of `t` cannot be inferred.
    #[error("adjacent pair unresolved around outcome {argmax}")]
    PairUnresolved { argmax: usize },

    #[error("interpolation function is not monotonic on [{lo}, {hi}]")]
    UnsupportedFunction { lo: f64, hi: f64 },

    #[error("level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
