//! Two-beam electro-optic sampling of vacuum field correlations with a
//! per-mode light-cone split into causal and non-causal parts.

// `!(a < b)` is how NaN-rejecting range checks are written here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dispersion;
pub mod engine;
pub mod error;
pub mod lightcone;
pub mod probe;
pub mod quadrature;
pub mod result;
pub mod signal;
pub mod sweep;
pub mod units;
pub mod vacuum;

pub use config::{validate_config, ExperimentConfig, QuadratureSpec, Strategy, ValidatedConfig};
pub use dispersion::DispersionModel;
pub use engine::{g1_per_frequency_momentum, g1_per_frequency_realspace, g1_time_domain, EngineResult};
pub use error::{Error, Result};
pub use lightcone::{ConeClassifier, Region, SplitRegion};
pub use probe::{PairKernel, ProbeKernel};
pub use vacuum::VacuumCorrelator;
pub use result::CorrelationResult;
pub use signal::{Spectrum, TimeTrace, Window};
pub use sweep::{run_sweep, run_sweep_with, SweepOptions};
