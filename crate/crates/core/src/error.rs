use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numeric stages of the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("histogram has no mass")]
    EmptyHistogram,
    #[error("histogram bin {index} is invalid ({value}); bins must be finite and non-negative")]
    InvalidBin { index: usize, value: f64 },
    #[error("smoothing half-width must be at least 1")]
    ZeroSmoothingWidth,
    #[error("standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("component weight must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("component mean must lie in [0, 255], got {0}")]
    InvalidMean(f64),
    #[error("histogram value at the mean ({index}) is not positive")]
    NonPositivePeak { index: usize },
    #[error("dynamic range [{lo}, {hi}] is degenerate")]
    DegenerateRange { lo: u8, hi: u8 },
    #[error("parameter vectors differ in length: {0}")]
    LengthMismatch(String),
    #[error("{which} CDF is not a non-decreasing sequence in [0, 1]")]
    InvalidCdf { which: &'static str },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("invalid value {value} for {name}: expected {expected}")]
    InvalidParam {
        name: &'static str,
        value: String,
        expected: &'static str,
    },
}
