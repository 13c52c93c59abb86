//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 input or configuration error, 3 numerical warning
//! (outputs written), 4 comparison failure.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use vacuumcone::config::{load_config, ExperimentConfig};
use vacuumcone::dispersion::{describe, flight_time, range_thz, DispersionModel};
use vacuumcone::lightcone::SplitRegion;
use vacuumcone::result::CorrelationResult;
use vacuumcone::signal::{
    compare, lowpass_3thz, parse_spectrum_csv, parse_trace_csv, spectrum_to_csv, trace_to_csv, Series,
};
use vacuumcone::sweep::{load_dispersion, run_sweep_with, SweepOptions};
use vacuumcone::units::{m_to_um, s_to_fs, um_to_m};
use vacuumcone::{validate_config, Error, ValidatedConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_COMPARISON: u8 = 4;

#[derive(Parser)]
#[command(name = "vacuumcone", version, about = "Two-beam EOS vacuum correlations with a light-cone split")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Config file (TOML); paper geometry when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides rng_seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "VACUUMCONE_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Total,
    Causal,
    Noncausal,
}

impl From<RegionArg> for SplitRegion {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Total => SplitRegion::Total,
            RegionArg::Causal => SplitRegion::Causal,
            RegionArg::Noncausal => SplitRegion::Noncausal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-frequency spectrum with total, causal and non-causal parts.
    Spectrum(RunArgs),
    /// Like `spectrum`, restricted to the chosen regions.
    Split {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_values = ["total", "causal", "noncausal"])]
        regions: Vec<RegionArg>,
    },
    /// Delay trace synthesised from the spectrum.
    Timedomain {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the 3 THz low-passed trace.
        #[arg(long)]
        lowpass: bool,
    },
    /// Compares two traces or two spectra (CSV).
    Compare {
        sim: PathBuf,
        exp: PathBuf,
        /// Statistical uncertainty, V²/m² (or V²/m² per THz for spectra).
        #[arg(long, default_value_t = 1.05)]
        sigma: f64,
        /// Restrict to LO:HI (fs for traces, THz for spectra).
        #[arg(long, value_parser = parse_band)]
        band: Option<(f64, f64)>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Prints n, n_g, cone speed and flight times over δr⊥ at the phase,
    /// group and band-averaged index.
    Dispersion {
        /// Table CSV (`freq_THz,n`); the bundled ZnTe table when omitted.
        table: Option<PathBuf>,
        /// Frequencies in THz; the table nodes when omitted.
        #[arg(long, value_delimiter = ',')]
        freq: Vec<f64>,
        #[arg(long, default_value_t = 50.0)]
        delta_r_um: f64,
    },
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err("band must satisfy LO < HI".into());
    }
    Ok((lo, hi))
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    config_path: Option<String>,
    output_dir: String,
    version: String,
    git: Option<&'static str>,
    timestamp_unix: u64,
    duration_s: f64,
    outputs: Vec<String>,
    summary: Value,
}

fn write_file(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<String>) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
    outputs.push(name.to_string());
    Ok(())
}

fn write_manifest(
    command: &str,
    config: Option<&Path>,
    dir: &Path,
    started: Instant,
    mut outputs: Vec<String>,
    summary: Value,
) -> Result<(), Failure> {
    outputs.push("manifest.json".into());
    let m = Manifest {
        command: command.into(),
        config_path: config.map(|p| p.display().to_string()),
        output_dir: dir.display().to_string(),
        version: env!("CARGO_PKG_VERSION").into(),
        git: option_env!("VACUUMCONE_GIT_REV"),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        duration_s: started.elapsed().as_secs_f64(),
        outputs,
        summary,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&m).expect("manifest serialises");
    fs::write(&path, text).map_err(|e| io_failure(&path, e))
}

fn load_validated(run: &RunArgs) -> Result<ValidatedConfig, Failure> {
    let mut cfg = match &run.config {
        Some(p) => load_config(p).map_err(|e| match e {
            Error::Io(io) => io_failure(p, io),
            other => Failure {
                code: EXIT_INPUT,
                message: format!("{}: {other}", p.display()),
            },
        })?,
        None => ExperimentConfig::paper_defaults(),
    };
    if let Some(seed) = run.seed {
        cfg.quadrature.rng_seed = seed;
    }
    validate_config(cfg).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("invalid configuration:\n{e}"),
    })
}

fn sweep(run: &RunArgs, regions: BTreeSet<SplitRegion>) -> Result<(ValidatedConfig, CorrelationResult), Failure> {
    let cfg = load_validated(run)?;
    let base = run.config.as_deref().and_then(Path::parent);
    let (dispersion, source) = load_dispersion(&cfg, base).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: match &cfg.dispersion_table {
            Some(t) => format!("dispersion table {t}: {e}"),
            None => e.to_string(),
        },
    })?;
    let opts = SweepOptions {
        regions,
        momentum: true,
        threads: run.threads,
    };
    let result = run_sweep_with(&cfg, dispersion, &source, &opts)?;
    Ok((cfg, result))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn numerical_status(result: &CorrelationResult) -> Result<(), Failure> {
    if result.is_fully_converged() {
        return Ok(());
    }
    let md = &result.metadata;
    let mut msg = String::new();
    for f in &md.failed_points {
        msg.push_str(&format!("point {} ({} THz) failed: {}\n", f.index, f.freq_thz, f.message));
    }
    if !md.nonconverged_points.is_empty() {
        msg.push_str(&format!(
            "error estimate above tolerance at grid points {:?}",
            md.nonconverged_points
        ));
    }
    Err(Failure {
        code: EXIT_NUMERICAL,
        message: msg.trim_end().to_string(),
    })
}

fn spectrum_summary(result: &CorrelationResult) -> Value {
    let peak = result.total_spectrum().peak();
    json!({
        "peak_freq_THz": peak.map(|p| p.0),
        "peak_value_per_THz": peak.map(|p| p.1),
        "noncausal_fraction_0.5_3THz": result.band_noncausal_fraction(0.5, 3.0),
        "failed_points": result.metadata.failed_points.len(),
        "nonconverged_points": result.metadata.nonconverged_points.len(),
    })
}

fn cmd_spectrum(name: &str, run: &RunArgs, regions: BTreeSet<SplitRegion>) -> Result<(), Failure> {
    let started = Instant::now();
    let (_, result) = sweep(run, regions)?;
    create_dir(&run.out)?;
    let mut outputs = Vec::new();
    write_file(&run.out, "spectrum.csv", &result.spectrum_csv(), &mut outputs)?;
    write_file(&run.out, "spectrum_total.csv", &spectrum_to_csv(&result.total_spectrum()), &mut outputs)?;
    write_file(&run.out, "result.json", &result.to_json(), &mut outputs)?;
    if let Some(t) = result.trace() {
        write_file(&run.out, "trace.csv", &trace_to_csv(&t), &mut outputs)?;
    }
    write_manifest(name, run.config.as_deref(), &run.out, started, outputs, spectrum_summary(&result))?;
    numerical_status(&result)
}

fn cmd_timedomain(run: &RunArgs, lowpass: bool) -> Result<(), Failure> {
    let started = Instant::now();
    let (_, result) = sweep(run, [SplitRegion::Total].into_iter().collect())?;
    let trace = result.trace().ok_or_else(|| Failure {
        code: EXIT_NUMERICAL,
        message: "no trace could be synthesised".into(),
    })?;
    create_dir(&run.out)?;
    let mut outputs = Vec::new();
    write_file(&run.out, "trace.csv", &trace_to_csv(&trace), &mut outputs)?;
    write_file(&run.out, "result.json", &result.to_json(), &mut outputs)?;
    let mut summary = json!({
        "value_at_zero_V2_per_m2": trace.value_at(0.0),
        "peak_to_peak_V2_per_m2": trace.peak_to_peak(),
    });
    if lowpass {
        let filtered = lowpass_3thz(&trace)?;
        write_file(&run.out, "trace_lowpass.csv", &trace_to_csv(&filtered), &mut outputs)?;
        summary["lowpass_value_at_zero_V2_per_m2"] = json!(filtered.value_at(0.0));
        summary["lowpass_peak_to_peak_V2_per_m2"] = json!(filtered.peak_to_peak());
    }
    write_manifest("timedomain", run.config.as_deref(), &run.out, started, outputs, summary)?;
    numerical_status(&result)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

/// Trace or spectrum, chosen by the header.
fn read_series(path: &Path) -> Result<(Series, &'static str), Failure> {
    let text = read_text(path)?;
    let first = text.trim_start_matches('\u{feff}').lines().next().unwrap_or("");
    let parsed = if first.trim_start().starts_with("delta_t_fs") {
        parse_trace_csv(&text).map(|t| (Series::from(&t), "trace"))
    } else {
        parse_spectrum_csv(&text).map(|s| (Series::from(&s), "spectrum"))
    };
    parsed.map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_compare(sim: &Path, exp: &Path, sigma: f64, band: Option<(f64, f64)>, out: &Path) -> Result<(), Failure> {
    let started = Instant::now();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Failure {
            code: EXIT_INPUT,
            message: format!("sigma must be positive (got {sigma})"),
        });
    }
    let (s, kind_s) = read_series(sim)?;
    let (e, kind_e) = read_series(exp)?;
    if kind_s != kind_e {
        return Err(Failure {
            code: EXIT_INPUT,
            message: format!("cannot compare a {kind_s} with a {kind_e}"),
        });
    }
    let report = compare(&s, &e, sigma, band)?;
    create_dir(out)?;
    let mut outputs = Vec::new();
    let text = serde_json::to_string_pretty(&json!({ "kind": kind_s, "report": report })).expect("report serialises");
    write_file(out, "comparison.json", &text, &mut outputs)?;
    let pass = report.fraction_within_2sigma >= 0.68;
    let summary = json!({
        "kind": kind_s,
        "fraction_within_2sigma": report.fraction_within_2sigma,
        "pass": pass,
        "sim_peak": report.sim_peak,
        "exp_peak": report.exp_peak,
    });
    write_manifest("compare", None, out, started, outputs, summary)?;
    println!(
        "{kind_s}: {:.3} of {} points within 2σ (σ = {sigma}); peaks at {} (sim) and {} (exp)",
        report.fraction_within_2sigma,
        report.abscissa.len(),
        report.sim_peak.at,
        report.exp_peak.at
    );
    if pass {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_COMPARISON,
            message: format!(
                "agreement fraction {:.3} below 0.68",
                report.fraction_within_2sigma
            ),
        })
    }
}

fn cmd_dispersion(table: Option<&Path>, freqs: &[f64], delta_r_um: f64) -> Result<(), Failure> {
    let model = match table {
        Some(p) => DispersionModel::load(p).map_err(|e| match e {
            Error::Io(io) => io_failure(p, io),
            other => Failure {
                code: EXIT_INPUT,
                message: format!("{}: {other}", p.display()),
            },
        })?,
        None => DispersionModel::znte(),
    };
    let freqs: Vec<f64> = if freqs.is_empty() {
        model.nodes().map(|(w, _)| vacuumcone::units::rad_per_s_to_thz(w)).collect()
    } else {
        freqs.to_vec()
    };
    let distance = um_to_m(delta_r_um);
    let mut rows = Vec::with_capacity(freqs.len());
    for &f in &freqs {
        let (n, ng, speed) = describe(&model, f).map_err(|e| {
            let (lo, hi) = range_thz(&model);
            Failure {
                code: EXIT_INPUT,
                message: format!("{f} THz: {e} (table covers {lo}–{hi} THz)"),
            }
        })?;
        rows.push((f, n, ng, speed));
    }
    // band-averaged index: mean phase index over the listed frequencies
    let n_band = rows.iter().map(|r| r.1).sum::<f64>() / rows.len().max(1) as f64;
    let band_fs = s_to_fs(flight_time(distance, n_band));
    println!(
        "freq_THz,n,n_g,cone_speed_um_per_ps,flight_phase_fs_over_{d}um,flight_group_fs_over_{d}um,flight_band_fs_over_{d}um",
        d = delta_r_um
    );
    for (f, n, ng, speed) in rows {
        println!(
            "{f},{n:.6},{ng:.6},{:.4},{:.3},{:.3},{band_fs:.3}",
            m_to_um(speed) * 1e-12,
            s_to_fs(flight_time(distance, n)),
            s_to_fs(flight_time(distance, ng)),
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum(run) => cmd_spectrum("spectrum", run, SplitRegion::ALL.into_iter().collect()),
        Command::Split { run, regions } => cmd_spectrum("split", run, regions.iter().map(|&r| r.into()).collect()),
        Command::Timedomain { run, lowpass } => cmd_timedomain(run, *lowpass),
        Command::Compare {
            sim,
            exp,
            sigma,
            band,
            out,
        } => cmd_compare(sim, exp, *sigma, *band, out),
        Command::Dispersion {
            table,
            freq,
            delta_r_um,
        } => cmd_dispersion(table.as_deref(), freq, *delta_r_um),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
