use thiserror::Error;

/// Errors raised by the capacity toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NegativeProbability: q{index} = {value}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("NotNormalized: probabilities sum to {sum}")]
    NotNormalized { sum: f64 },

    #[error("MuOutOfRange: mu = {0} is outside [0, 1]")]
    MuOutOfRange(f64),

    #[error("NonFinite: {0} is not a finite number")]
    NonFinite(&'static str),

    #[error("NotNormalized: Bell vector has squared norm {norm_sq}")]
    VectorNotNormalized { norm_sq: f64 },

    #[error("InvalidDensityMatrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("NotHermitian: largest asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("IndexError: index {0} out of range or repeated")]
    IndexError(usize),

    #[error("NegativeEigenvalue: {0:e}")]
    NegativeEigenvalue(f64),

    #[error("InvalidSpectrum: {0}")]
    InvalidSpectrum(String),

    #[error("XOutOfRange: x = {x} is outside [{lo}, {hi}]")]
    XOutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("NotRegularized: {0}")]
    NotRegularized(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("NoCrossing: enhancement is {enhanced} at both mu = {mu_lo} and mu = {mu_hi}")]
    NoCrossing { mu_lo: f64, mu_hi: f64, enhanced: bool },
}

pub type Result<T> = std::result::Result<T, Error>;
