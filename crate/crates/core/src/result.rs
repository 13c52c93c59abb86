//! Sweep output: per-frequency spectra, the synthesised delay trace, the
//! configuration snapshot and provenance, with JSON and CSV exports.
//!
//! Exported units: frequencies in THz, spectra in V²/m² per THz (two-sided),
//! delays in fs, traces in V²/m².

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Strategy};
use crate::engine::EnginePath;
use crate::lightcone::SplitRegion;
use crate::signal::{Spectrum, TimeTrace};
use crate::units::fs_to_s;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub unit: String,
}

impl GridSpec {
    pub fn of(values: &[f64], scale: f64, unit: &str) -> Self {
        Self {
            min: values.first().map_or(f64::NAN, |v| v * scale),
            max: values.last().map_or(f64::NAN, |v| v * scale),
            points: values.len(),
            unit: unit.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedPoint {
    pub index: usize,
    pub freq_thz: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub engine: String,
    pub regions: Vec<SplitRegion>,
    pub realspace_strategy: Strategy,
    pub mc_samples: usize,
    pub strata: usize,
    pub rng_seed: u64,
    pub quad_rel_tol: f64,
    /// Convergence is judged against this reference: the largest |total|
    /// across the sweep.
    pub convergence_reference: f64,
    pub spectral_convention: String,
    pub waist_convention: String,
    pub pulse_convention: String,
    pub dispersion_source: String,
    pub freq_grid: GridSpec,
    pub delay_grid: GridSpec,
    pub time_domain_path: Option<EnginePath>,
    pub failed_points: Vec<FailedPoint>,
    pub nonconverged_points: Vec<usize>,
}

/// Per-frequency arrays; `None` marks regions not requested or failed points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PerFrequency {
    #[serde(rename = "freq_THz")]
    pub freq_thz: Vec<f64>,
    pub total: Vec<Option<f64>>,
    pub total_err: Vec<Option<f64>>,
    pub causal: Vec<Option<f64>>,
    pub causal_err: Vec<Option<f64>>,
    pub noncausal: Vec<Option<f64>>,
    pub noncausal_err: Vec<Option<f64>>,
    pub momentum_total: Vec<Option<f64>>,
    pub momentum_err: Vec<Option<f64>>,
    pub converged: Vec<bool>,
}

impl PerFrequency {
    pub fn column(&self, region: SplitRegion) -> (&[Option<f64>], &[Option<f64>]) {
        match region {
            SplitRegion::Total => (&self.total, &self.total_err),
            SplitRegion::Causal => (&self.causal, &self.causal_err),
            SplitRegion::Noncausal => (&self.noncausal, &self.noncausal_err),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeDomain {
    pub delay_fs: Vec<f64>,
    #[serde(rename = "G_V2_per_m2")]
    pub g: Vec<f64>,
    /// |2∫dΩ e^{−iΩδt} G(Ω)|.
    pub envelope: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub config: ExperimentConfig,
    pub metadata: Provenance,
    pub per_frequency: PerFrequency,
    pub time_domain: TimeDomain,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl CorrelationResult {
    pub fn is_fully_converged(&self) -> bool {
        self.metadata.failed_points.is_empty() && self.metadata.nonconverged_points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result contains only finite numbers")
    }

    /// Parses and checks that the per-frequency and time-domain columns
    /// line up.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        use serde::de::Error as _;
        let r: Self = serde_json::from_str(text)?;
        let p = &r.per_frequency;
        let n = p.freq_thz.len();
        let columns = [
            p.total.len(),
            p.total_err.len(),
            p.causal.len(),
            p.causal_err.len(),
            p.noncausal.len(),
            p.noncausal_err.len(),
            p.momentum_total.len(),
            p.momentum_err.len(),
            p.converged.len(),
        ];
        if columns.iter().any(|&c| c != n) {
            return Err(serde_json::Error::custom(format!(
                "per_frequency columns differ in length from freq_THz ({n})"
            )));
        }
        let t = &r.time_domain;
        if t.g.len() != t.delay_fs.len() || t.envelope.len() != t.delay_fs.len() {
            return Err(serde_json::Error::custom("time_domain columns differ in length"));
        }
        Ok(r)
    }

    /// `freq_THz,total,total_err,causal,causal_err,noncausal,noncausal_err,momentum_total`.
    pub fn spectrum_csv(&self) -> String {
        let p = &self.per_frequency;
        let mut out =
            String::from("freq_THz,total,total_err,causal,causal_err,noncausal,noncausal_err,momentum_total\n");
        for i in 0..p.freq_thz.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.freq_thz[i],
                fmt_opt(p.total[i]),
                fmt_opt(p.total_err[i]),
                fmt_opt(p.causal[i]),
                fmt_opt(p.causal_err[i]),
                fmt_opt(p.noncausal[i]),
                fmt_opt(p.noncausal_err[i]),
                fmt_opt(p.momentum_total[i]),
            );
        }
        out
    }

    /// The total spectrum as a [`Spectrum`], real-space values where present
    /// and momentum values otherwise. Failed points are skipped.
    pub fn total_spectrum(&self) -> Spectrum {
        let p = &self.per_frequency;
        let mut f = Vec::new();
        let mut v = Vec::new();
        let mut e = Vec::new();
        for i in 0..p.freq_thz.len() {
            let pick = match (p.total[i], p.momentum_total[i]) {
                (Some(t), _) => Some((t, p.total_err[i].unwrap_or(0.0))),
                (None, Some(m)) => Some((m, p.momentum_err[i].unwrap_or(0.0))),
                _ => None,
            };
            if let Some((val, err)) = pick {
                f.push(p.freq_thz[i]);
                v.push(val);
                e.push(err);
            }
        }
        Spectrum {
            freqs_thz: f,
            values: v,
            errors: Some(e),
        }
    }

    pub fn trace(&self) -> Option<TimeTrace> {
        let d: Vec<f64> = self.time_domain.delay_fs.iter().map(|t| fs_to_s(*t)).collect();
        TimeTrace::new(d, self.time_domain.g.clone(), None).ok()
    }

    /// noncausal/total for each grid frequency inside [lo, hi] THz.
    pub fn noncausal_fractions(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let p = &self.per_frequency;
        (0..p.freq_thz.len())
            .filter(|&i| p.freq_thz[i] >= lo - 1e-9 && p.freq_thz[i] <= hi + 1e-9)
            .filter_map(|i| Some((p.freq_thz[i], p.noncausal[i]? / p.total[i]?)))
            .collect()
    }

    /// Σ noncausal / Σ total over [lo, hi] THz.
    pub fn band_noncausal_fraction(&self, lo: f64, hi: f64) -> Option<f64> {
        let p = &self.per_frequency;
        let (mut nc, mut tot) = (0.0, 0.0);
        for i in 0..p.freq_thz.len() {
            if p.freq_thz[i] >= lo - 1e-9 && p.freq_thz[i] <= hi + 1e-9 {
                nc += p.noncausal[i]?;
                tot += p.total[i]?;
            }
        }
        (tot != 0.0).then_some(nc / tot)
    }
}
