//! Parallel evaluation of a configuration over its frequency grid.
//!
//! Every grid point gets its own random stream derived from (seed, index)
//! and writes into its own slot, so the result does not depend on the
//! number of worker threads or their scheduling.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::config::ValidatedConfig;
use crate::dispersion::DispersionModel;
use crate::engine::{
    check_grid_density, g1_envelope, g1_per_frequency_momentum, g1_time_domain, realspace_split, EngineInputs,
    EnginePath, EngineResult, SplitResult,
};
use crate::error::{Error, Result};
use crate::lightcone::SplitRegion;
use crate::probe::PairKernel;
use crate::result::{CorrelationResult, FailedPoint, GridSpec, PerFrequency, Provenance, TimeDomain};
use crate::units::{per_rad_s_to_per_thz, rad_per_s_to_thz};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub regions: BTreeSet<SplitRegion>,
    /// Also evaluate the momentum-space total at every point.
    pub momentum: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            regions: SplitRegion::ALL.into_iter().collect(),
            momentum: true,
            threads: None,
        }
    }
}

/// The dispersion table named by the config (resolved against `base`), or
/// the bundled ZnTe table. Returns the model and a description of its source.
pub fn load_dispersion(cfg: &ValidatedConfig, base: Option<&Path>) -> Result<(Arc<DispersionModel>, String)> {
    match &cfg.dispersion_table {
        Some(p) => {
            let path = match base {
                Some(b) if Path::new(p).is_relative() => b.join(p),
                _ => Path::new(p).to_path_buf(),
            };
            Ok((Arc::new(DispersionModel::load(&path)?), path.display().to_string()))
        }
        None => Ok((
            Arc::new(DispersionModel::znte()),
            "bundled ZnTe table (Lorentz-oscillator model)".to_string(),
        )),
    }
}

#[derive(Debug, Clone)]
struct PointOutcome {
    split: Option<SplitResult>,
    momentum: Option<EngineResult>,
    error: Option<String>,
}

fn evaluate_point(
    index: usize,
    omega: f64,
    cfg: &ValidatedConfig,
    inputs: &EngineInputs,
    opts: &SweepOptions,
) -> PointOutcome {
    let pair = PairKernel::from_config(cfg, 0.0);
    let spec = cfg.quadrature.for_point(index);
    let mut out = PointOutcome {
        split: None,
        momentum: None,
        error: None,
    };
    if !opts.regions.is_empty() {
        match realspace_split(&pair, &inputs.correlator, &inputs.classifier, omega, &spec) {
            Ok(s) if s.total.value.is_finite() && s.causal.value.is_finite() && s.noncausal.value.is_finite() => {
                out.split = Some(s)
            }
            Ok(_) => out.error = Some("non-finite real-space value".into()),
            Err(e) => out.error = Some(e.to_string()),
        }
    }
    if opts.momentum {
        match g1_per_frequency_momentum(&pair, &inputs.correlator, omega) {
            Ok(m) if m.value.is_finite() => out.momentum = Some(m),
            Ok(_) => {
                out.error.get_or_insert_with(|| "non-finite momentum value".into());
            }
            Err(e) => {
                out.error.get_or_insert(e.to_string());
            }
        }
    }
    out
}

/// Sweep with the dispersion table named in the config (or the bundled one).
pub fn run_sweep(cfg: &ValidatedConfig, regions: &BTreeSet<SplitRegion>) -> Result<CorrelationResult> {
    let (dispersion, source) = load_dispersion(cfg, None)?;
    let opts = SweepOptions {
        regions: regions.clone(),
        ..SweepOptions::default()
    };
    run_sweep_with(cfg, dispersion, &source, &opts)
}

pub fn run_sweep_with(
    cfg: &ValidatedConfig,
    dispersion: Arc<DispersionModel>,
    dispersion_source: &str,
    opts: &SweepOptions,
) -> Result<CorrelationResult> {
    check_grid_density(&cfg.freq_grid, &cfg.delay_grid)?;
    let inputs = EngineInputs::new(dispersion, cfg.temperature);
    let work = || -> Vec<PointOutcome> {
        cfg.freq_grid
            .par_iter()
            .enumerate()
            .map(|(i, &w)| evaluate_point(i, w, cfg, &inputs, opts))
            .collect()
    };
    let outcomes = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(assemble(cfg, dispersion_source, opts, &outcomes))
}

/// Drops the unit-conversion noise (0.30000000000000004 → 0.3) from
/// exported grid coordinates.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn assemble(cfg: &ValidatedConfig, dispersion_source: &str, opts: &SweepOptions, outcomes: &[PointOutcome]) -> CorrelationResult {
    let scale = per_rad_s_to_per_thz(1.0);
    let n = outcomes.len();
    let mut pf = PerFrequency {
        freq_thz: cfg.freq_grid.iter().map(|&w| tidy(rad_per_s_to_thz(w))).collect(),
        ..PerFrequency::default()
    };
    let reference = outcomes
        .iter()
        .filter_map(|o| o.split.map(|s| s.total.value).or(o.momentum.map(|m| m.value)))
        .fold(0.0, |a: f64, v| a.max(v.abs()));
    let tol = cfg.quadrature.quad_rel_tol * reference;

    let mut failed = Vec::new();
    let mut nonconverged = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let mut ok = o.error.is_none();
        for region in SplitRegion::ALL {
            let (v, e) = match (&o.split, opts.regions.contains(&region)) {
                (Some(s), true) => {
                    let r = s.get(region);
                    ok &= r.stat_error <= tol;
                    (Some(r.value * scale), Some(r.stat_error * scale))
                }
                _ => (None, None),
            };
            let (vals, errs) = match region {
                SplitRegion::Total => (&mut pf.total, &mut pf.total_err),
                SplitRegion::Causal => (&mut pf.causal, &mut pf.causal_err),
                SplitRegion::Noncausal => (&mut pf.noncausal, &mut pf.noncausal_err),
            };
            vals.push(v);
            errs.push(e);
        }
        if let Some(m) = o.momentum {
            ok &= m.converged;
        }
        pf.momentum_total.push(o.momentum.map(|m| m.value * scale));
        pf.momentum_err.push(o.momentum.map(|m| m.stat_error * scale));
        pf.converged.push(ok);
        if let Some(msg) = &o.error {
            failed.push(FailedPoint {
                index: i,
                freq_thz: pf.freq_thz[i],
                message: msg.clone(),
            });
        } else if !ok {
            nonconverged.push(i);
        }
    }

    // the trace uses the real-space total where available
    let (path, pairs): (Option<EnginePath>, Vec<(f64, f64)>) = if outcomes.iter().any(|o| o.split.is_some()) {
        (
            Some(EnginePath::Realspace),
            outcomes
                .iter()
                .zip(&cfg.freq_grid)
                .filter_map(|(o, &w)| o.split.map(|s| (w, s.total.value)))
                .collect(),
        )
    } else {
        (
            Some(EnginePath::Momentum),
            outcomes
                .iter()
                .zip(&cfg.freq_grid)
                .filter_map(|(o, &w)| o.momentum.map(|m| (w, m.value)))
                .collect(),
        )
    };
    let (omegas, values): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let time_domain = match (
        g1_time_domain(&omegas, &values, &cfg.delay_grid),
        g1_envelope(&omegas, &values, &cfg.delay_grid),
    ) {
        (Ok(g), Ok(envelope)) => Some(TimeDomain {
            delay_fs: cfg.delay_grid.iter().map(|t| tidy(t * 1e15)).collect(),
            g,
            envelope,
        }),
        _ => None,
    };

    let metadata = Provenance {
        engine: format!("vacuumcone {}", env!("CARGO_PKG_VERSION")),
        regions: opts.regions.iter().copied().collect(),
        realspace_strategy: cfg.quadrature.strategy,
        mc_samples: cfg.quadrature.mc_samples,
        strata: cfg.quadrature.strata,
        rng_seed: cfg.quadrature.rng_seed,
        quad_rel_tol: cfg.quadrature.quad_rel_tol,
        convergence_reference: reference * scale,
        spectral_convention: "two-sided density: G(dt) = 2 * int_0^inf df cos(2 pi f dt) G(f)".into(),
        waist_convention: "1/e^2 intensity radius".into(),
        pulse_convention: "intensity FWHM".into(),
        dispersion_source: dispersion_source.to_string(),
        freq_grid: GridSpec::of(&cfg.freq_grid, rad_per_s_to_thz(1.0), "THz"),
        delay_grid: GridSpec::of(&cfg.delay_grid, 1e15, "fs"),
        time_domain_path: time_domain.as_ref().and(path),
        failed_points: failed,
        nonconverged_points: nonconverged,
    };
    debug_assert_eq!(pf.total.len(), n);
    CorrelationResult {
        config: cfg.get().clone(),
        metadata,
        per_frequency: pf,
        time_domain: time_domain.unwrap_or_default(),
    }
}
