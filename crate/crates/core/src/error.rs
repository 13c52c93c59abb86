use std::fmt;

use thiserror::Error;

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field}: length/duration must be positive (got {value})")]
    NegativeLength { field: &'static str, value: f64 },
    #[error("{field}: temperature must be non-negative (got {value})")]
    NegativeTemperature { field: &'static str, value: f64 },
    #[error("{field}: grid is empty")]
    EmptyGrid { field: &'static str },
    #[error("{field}: grid must be strictly increasing (entry {index})")]
    NonMonotonicGrid { field: &'static str, index: usize },
    #[error("{field}: entries must be positive and finite (entry {index} = {value})")]
    NonPositiveFrequency {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{field}: refractive index must be >= 1 (got {value})")]
    NonPhysicalIndex { field: &'static str, value: f64 },
    #[error("{field}: {reason}")]
    InvalidQuadrature {
        field: &'static str,
        reason: String,
    },
    #[error("{field}: value is not finite")]
    NotFinite { field: &'static str },
}

impl ConfigError {
    pub fn field(&self) -> &'static str {
        match self {
            ConfigError::NegativeLength { field, .. }
            | ConfigError::NegativeTemperature { field, .. }
            | ConfigError::EmptyGrid { field }
            | ConfigError::NonMonotonicGrid { field, .. }
            | ConfigError::NonPositiveFrequency { field, .. }
            | ConfigError::NonPhysicalIndex { field, .. }
            | ConfigError::InvalidQuadrature { field, .. }
            | ConfigError::NotFinite { field } => field,
        }
    }
}

/// Every invariant violated by a configuration, in field order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration:\n{0}")]
    Config(ConfigErrors),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("refractive index {n} at line {line} is below 1")]
    NonPhysicalIndex { line: usize, n: f64 },
    #[error("dispersion table needs at least {required} samples, found {found}")]
    TooFewSamples { found: usize, required: usize },
    #[error("frequency {omega:e} rad/s outside validity range [{min:e}, {max:e}] rad/s")]
    OutOfRange { omega: f64, min: f64, max: f64 },
    #[error("containment must lie strictly between 0 and 1 (got {0})")]
    InvalidContainment(f64),
    #[error("probes must share the crystal: lengths {0} m and {1} m differ")]
    MismatchedCrystal(f64, f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("samples are not uniformly spaced (first deviation at index {index})")]
    NonUniformSpacing { index: usize },
    #[error("trace too short: {found} samples, need at least {required}")]
    TooShort { found: usize, required: usize },
    #[error("inputs have no overlapping abscissa range")]
    NoOverlap,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
