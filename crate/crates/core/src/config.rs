//! Experiment configuration: the flat key-value file format, the SI-unit
//! in-memory model and its validation.
//!
//! Config files are TOML with flat keys only:
//!
//! ```toml
//! delta_r_perp_um = 50.0
//! waist_um = 10.0           # 1/e² intensity radius
//! pulse_fwhm_fs = 195.0     # intensity FWHM
//! crystal_length_mm = 1.0
//! temperature_K = 4.0
//! probe_group_index = 3.24
//! freq_min_THz = 0.1
//! freq_max_THz = 5.0
//! freq_points = 50
//! delay_min_fs = -2000.0
//! delay_max_fs = 2000.0
//! delay_points = 201
//! mc_samples = 100000
//! quad_rel_tol = 0.01
//! rng_seed = 1
//! # optional: dispersion_table = "path/to/table.csv"
//! ```
//!
//! Every key except `dispersion_table` is required; unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ConfigErrors, Error, Result};
use crate::units::{fs_to_s, mm_to_m, thz_to_rad_per_s, um_to_m};

/// Sampling strategy for the real-space engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    StratifiedMc,
    TensorQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub mc_samples: usize,
    pub rng_seed: u64,
    /// Stream index mixed into the seed; the sweep sets it per grid point.
    pub stream: u64,
    pub quad_rel_tol: f64,
    pub max_subdivisions: usize,
    /// Number of strata along the longitudinal separation coordinate.
    pub strata: usize,
    pub strategy: Strategy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            mc_samples: 100_000,
            rng_seed: 1,
            stream: 0,
            quad_rel_tol: 1e-2,
            max_subdivisions: 20_000,
            strata: 1024,
            strategy: Strategy::StratifiedMc,
        }
    }
}

impl QuadratureSpec {
    /// Copy of this spec bound to grid point `index`.
    pub fn for_point(&self, index: usize) -> Self {
        Self {
            stream: index as u64,
            ..self.clone()
        }
    }
}

/// All physical and numerical parameters, SI units, explicit grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Transverse beam separation δr⊥, m.
    pub delta_r_perp: f64,
    /// 1/e² intensity radius, m.
    pub waist: f64,
    /// Intensity FWHM, s.
    pub pulse_fwhm: f64,
    pub crystal_length: f64,
    /// Kelvin.
    pub temperature: f64,
    pub probe_group_index: f64,
    /// Angular frequencies, rad/s.
    pub freq_grid: Vec<f64>,
    /// Delays δt, s.
    pub delay_grid: Vec<f64>,
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion_table: Option<String>,
}

/// Default near-infrared group index of ZnTe around 800 nm.
pub const DEFAULT_PROBE_GROUP_INDEX: f64 = 3.24;

impl ExperimentConfig {
    /// Geometry of the measurement described for the ZnTe experiment:
    /// δr⊥ = 50 μm, w = 10 μm, τ_p = 195 fs, L_c = 1 mm, T = 4 K, on the
    /// default 0.1–5 THz / ±2 ps grids.
    pub fn paper_defaults() -> Self {
        ConfigFile::default().into_config()
    }
}

/// Configuration that passed [`validate_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig(ExperimentConfig);

impl ValidatedConfig {
    pub fn get(&self) -> &ExperimentConfig {
        &self.0
    }

    pub fn into_inner(self) -> ExperimentConfig {
        self.0
    }
}

impl std::ops::Deref for ValidatedConfig {
    type Target = ExperimentConfig;
    fn deref(&self) -> &ExperimentConfig {
        &self.0
    }
}

fn check_grid(field: &'static str, grid: &[f64], errors: &mut Vec<ConfigError>, positive: bool) {
    if grid.is_empty() {
        errors.push(ConfigError::EmptyGrid { field });
        return;
    }
    for (i, &v) in grid.iter().enumerate() {
        if !v.is_finite() {
            errors.push(ConfigError::NotFinite { field });
            return;
        }
        if positive && v <= 0.0 {
            errors.push(ConfigError::NonPositiveFrequency { field, index: i, value: v });
            break;
        }
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        errors.push(ConfigError::NonMonotonicGrid { field, index: i + 1 });
    }
}

/// Checks every invariant and reports all violations at once.
pub fn validate_config(cfg: ExperimentConfig) -> std::result::Result<ValidatedConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let positive = |field: &'static str, v: f64, errors: &mut Vec<ConfigError>| {
        if !v.is_finite() {
            errors.push(ConfigError::NotFinite { field });
        } else if v <= 0.0 {
            errors.push(ConfigError::NegativeLength { field, value: v });
        }
    };
    if !cfg.delta_r_perp.is_finite() {
        errors.push(ConfigError::NotFinite { field: "delta_r_perp" });
    } else if cfg.delta_r_perp < 0.0 {
        errors.push(ConfigError::NegativeLength {
            field: "delta_r_perp",
            value: cfg.delta_r_perp,
        });
    }
    positive("waist", cfg.waist, &mut errors);
    positive("pulse_fwhm", cfg.pulse_fwhm, &mut errors);
    positive("crystal_length", cfg.crystal_length, &mut errors);
    if !cfg.temperature.is_finite() {
        errors.push(ConfigError::NotFinite { field: "temperature" });
    } else if cfg.temperature < 0.0 {
        errors.push(ConfigError::NegativeTemperature {
            field: "temperature",
            value: cfg.temperature,
        });
    }
    if !(cfg.probe_group_index >= 1.0) || !cfg.probe_group_index.is_finite() {
        errors.push(ConfigError::NonPhysicalIndex {
            field: "probe_group_index",
            value: cfg.probe_group_index,
        });
    }
    check_grid("freq_grid", &cfg.freq_grid, &mut errors, true);
    check_grid("delay_grid", &cfg.delay_grid, &mut errors, false);

    let q = &cfg.quadrature;
    if q.mc_samples < 10_000 {
        errors.push(ConfigError::InvalidQuadrature {
            field: "mc_samples",
            reason: format!("need at least 10000 samples, got {}", q.mc_samples),
        });
    }
    if !(q.quad_rel_tol > 0.0 && q.quad_rel_tol < 0.1) {
        errors.push(ConfigError::InvalidQuadrature {
            field: "quad_rel_tol",
            reason: format!("must lie in (0, 0.1), got {}", q.quad_rel_tol),
        });
    }
    if q.strata == 0 {
        errors.push(ConfigError::InvalidQuadrature {
            field: "strata",
            reason: "must be positive".into(),
        });
    }
    if q.max_subdivisions == 0 {
        errors.push(ConfigError::InvalidQuadrature {
            field: "max_subdivisions",
            reason: "must be positive".into(),
        });
    }
    if errors.is_empty() {
        Ok(ValidatedConfig(cfg))
    } else {
        Err(ConfigErrors(errors))
    }
}

/// On-disk representation in human units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub delta_r_perp_um: f64,
    pub waist_um: f64,
    pub pulse_fwhm_fs: f64,
    pub crystal_length_mm: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub probe_group_index: f64,
    #[serde(rename = "freq_min_THz")]
    pub freq_min_thz: f64,
    #[serde(rename = "freq_max_THz")]
    pub freq_max_thz: f64,
    pub freq_points: usize,
    pub delay_min_fs: f64,
    pub delay_max_fs: f64,
    pub delay_points: usize,
    pub mc_samples: usize,
    pub quad_rel_tol: f64,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion_table: Option<String>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            delta_r_perp_um: 50.0,
            waist_um: 10.0,
            pulse_fwhm_fs: 195.0,
            crystal_length_mm: 1.0,
            temperature_k: 4.0,
            probe_group_index: DEFAULT_PROBE_GROUP_INDEX,
            freq_min_thz: 0.1,
            freq_max_thz: 5.0,
            freq_points: 50,
            delay_min_fs: -2000.0,
            delay_max_fs: 2000.0,
            delay_points: 201,
            mc_samples: 100_000,
            quad_rel_tol: 1e-2,
            rng_seed: 1,
            dispersion_table: None,
        }
    }
}

/// `points` values from `lo` to `hi` inclusive; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                let t = i as f64 / (points - 1) as f64;
                if i == points - 1 {
                    hi
                } else {
                    lo + t * (hi - lo)
                }
            })
            .collect(),
    }
}

impl ConfigFile {
    pub fn into_config(self) -> ExperimentConfig {
        ExperimentConfig {
            delta_r_perp: um_to_m(self.delta_r_perp_um),
            waist: um_to_m(self.waist_um),
            pulse_fwhm: fs_to_s(self.pulse_fwhm_fs),
            crystal_length: mm_to_m(self.crystal_length_mm),
            temperature: self.temperature_k,
            probe_group_index: self.probe_group_index,
            freq_grid: linspace(self.freq_min_thz, self.freq_max_thz, self.freq_points)
                .into_iter()
                .map(thz_to_rad_per_s)
                .collect(),
            delay_grid: linspace(self.delay_min_fs, self.delay_max_fs, self.delay_points)
                .into_iter()
                .map(fs_to_s)
                .collect(),
            quadrature: QuadratureSpec {
                mc_samples: self.mc_samples,
                quad_rel_tol: self.quad_rel_tol,
                rng_seed: self.rng_seed,
                ..QuadratureSpec::default()
            },
            dispersion_table: self.dispersion_table,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serialises")
    }
}

/// Parses config text into the SI model (not yet validated).
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| line_col(text, s.start))
            .unwrap_or((1, 1));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    Ok(file.into_config())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = offset - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
    (line, col)
}

pub fn load_config(path: impl AsRef<std::path::Path>) -> Result<ExperimentConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_defaults_validate() {
        let cfg = ExperimentConfig::paper_defaults();
        assert!((cfg.delta_r_perp - 50e-6).abs() < 1e-18);
        assert!((cfg.waist - 10e-6).abs() < 1e-18);
        assert!((cfg.pulse_fwhm - 195e-15).abs() < 1e-27);
        assert_eq!(cfg.temperature, 4.0);
        assert_eq!(cfg.freq_grid.len(), 50);
        assert_eq!(cfg.delay_grid.len(), 201);
        validate_config(cfg).unwrap();
    }

    #[test]
    fn zero_waist_named() {
        let mut cfg = ExperimentConfig::paper_defaults();
        cfg.waist = 0.0;
        let errs = validate_config(cfg).unwrap_err();
        assert_eq!(errs.0.len(), 1);
        assert!(matches!(errs.0[0], ConfigError::NegativeLength { field: "waist", .. }));
        assert!(errs.to_string().contains("waist"));
    }

    #[test]
    fn decreasing_grid_rejected() {
        let mut cfg = ExperimentConfig::paper_defaults();
        cfg.freq_grid = vec![thz_to_rad_per_s(2.0), thz_to_rad_per_s(1.0)];
        let errs = validate_config(cfg).unwrap_err();
        assert!(errs.0.iter().any(|e| matches!(e, ConfigError::NonMonotonicGrid { field: "freq_grid", .. })));
    }

    #[test]
    fn every_violation_reported() {
        let mut cfg = ExperimentConfig::paper_defaults();
        cfg.waist = -1.0;
        cfg.crystal_length = 0.0;
        cfg.temperature = -3.0;
        cfg.delay_grid.clear();
        let errs = validate_config(cfg).unwrap_err();
        let fields: Vec<_> = errs.0.iter().map(ConfigError::field).collect();
        assert_eq!(fields, ["waist", "crystal_length", "temperature", "delay_grid"]);
    }

    #[test]
    fn round_trip_through_text() {
        let text = ConfigFile::default().to_toml();
        let cfg = parse_config_str(&text).unwrap();
        assert_eq!(cfg, ExperimentConfig::paper_defaults());
    }

    #[test]
    fn unknown_and_missing_keys_rejected() {
        let mut text = ConfigFile::default().to_toml();
        text.push_str("bogus = 1\n");
        assert!(matches!(parse_config_str(&text), Err(Error::Parse { .. })));
        let text = "waist_um = 10.0\n";
        assert!(parse_config_str(text).is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = linspace(0.1, 5.0, 50);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[49], 5.0);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    proptest! {
        #[test]
        fn validation_is_total(
            d in proptest::num::f64::ANY,
            w in proptest::num::f64::ANY,
            t in proptest::num::f64::ANY,
            ng in proptest::num::f64::ANY,
            f in proptest::collection::vec(proptest::num::f64::ANY, 0..5),
        ) {
            let mut cfg = ExperimentConfig::paper_defaults();
            cfg.delta_r_perp = d;
            cfg.waist = w;
            cfg.temperature = t;
            cfg.probe_group_index = ng;
            cfg.freq_grid = f;
            if let Err(e) = validate_config(cfg) {
                prop_assert!(!e.0.is_empty());
            }
        }

        #[test]
        fn parser_never_panics(s in "\\PC{0,200}") {
            let _ = parse_config_str(&s);
        }
    }
}
