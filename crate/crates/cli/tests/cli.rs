use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_vacuumcone"));
    c.env_remove("VACUUMCONE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
delta_r_perp_um = 50.0
waist_um = 10.0
pulse_fwhm_fs = 195.0
crystal_length_mm = 1.0
temperature_K = 4.0
probe_group_index = 3.24
freq_min_THz = 0.8
freq_max_THz = 1.2
freq_points = 5
delay_min_fs = -2000.0
delay_max_fs = 2000.0
delay_points = 201
mc_samples = 10000
quad_rel_tol = 0.05
rng_seed = 3
"#;

fn small_config(dir: &Path) -> PathBuf {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p
}

fn config_with(dir: &Path, key: &str, value: &str) -> PathBuf {
    let text: String = SMALL
        .lines()
        .map(|l| {
            if l.starts_with(&format!("{key} =")) {
                format!("{key} = {value}\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let p = dir.join(format!("{key}.toml"));
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_every_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("run");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["spectrum.csv", "spectrum_total.csv", "result.json", "trace.csv", "manifest.json"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("freq_THz,total,total_err,causal,causal_err,noncausal,noncausal_err,momentum_total")
    );
    assert_eq!(lines.count(), 5);
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("delta_t_fs,G_V2_per_m2\n"));
    assert_eq!(trace.lines().count(), 202);

    let result = json(&out.join("result.json"));
    let md = &result["metadata"];
    assert_eq!(md["waist_convention"], "1/e^2 intensity radius");
    assert_eq!(md["pulse_convention"], "intensity FWHM");
    assert_eq!(md["rng_seed"], 3);
    assert_eq!(result["per_frequency"]["freq_THz"][2], 1.0);
    assert!(result.get("timestamp").is_none() && md.get("timestamp").is_none());

    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "spectrum");
    assert!(manifest["timestamp_unix"].as_u64().unwrap() > 0);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 5);
}

#[test]
fn output_is_independent_of_thread_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin()
        .args(["spectrum", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()])
        .env("VACUUMCONE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["result.json", "spectrum.csv", "trace.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    // manifests differ only in where, when and how long
    let (mut ma, mut mb) = (json(&a.join("manifest.json")), json(&b.join("manifest.json")));
    for m in [&mut ma, &mut mb] {
        let obj = m.as_object_mut().unwrap();
        for k in ["timestamp_unix", "duration_s", "output_dir"] {
            obj.remove(k);
        }
    }
    assert_eq!(ma, mb);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, seed) in [(&a, "5"), (&b, "6")] {
        let o = run(&["split", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--seed", seed]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (ra, rb) = (json(&a.join("result.json")), json(&b.join("result.json")));
    assert_eq!(ra["metadata"]["rng_seed"], 5);
    assert_ne!(ra["per_frequency"]["total"], rb["per_frequency"]["total"]);
    assert_eq!(ra["per_frequency"]["momentum_total"], rb["per_frequency"]["momentum_total"]);
}

#[test]
fn zero_waist_is_an_input_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = config_with(tmp.path(), "waist_um", "0.0");
    let out = tmp.path().join("never");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("waist"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn single_delay_is_an_input_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = config_with(tmp.path(), "delay_points", "1");
    let out = tmp.path().join("never");
    let o = run(&["timedomain", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn coarse_frequency_grid_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = config_with(tmp.path(), "freq_points", "3");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("grid too coarse"), "{}", stderr(&o));
}

#[test]
fn missing_and_malformed_configs() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["spectrum", "--config", tmp.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "waist_um = \"wide\"\n").unwrap();
    let o = run(&["spectrum", "--config", bad.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.toml"));
}

#[test]
fn lowpass_output_only_when_requested() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let plain = tmp.path().join("plain");
    let filtered = tmp.path().join("filtered");
    let o = run(&["timedomain", "--config", cfg.to_str().unwrap(), "--out", plain.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(plain.join("trace.csv").is_file());
    assert!(!plain.join("trace_lowpass.csv").exists());
    let o = run(&["timedomain", "--config", cfg.to_str().unwrap(), "--out", filtered.to_str().unwrap(), "--lowpass"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lp = fs::read_to_string(filtered.join("trace_lowpass.csv")).unwrap();
    assert!(lp.starts_with("delta_t_fs,G_V2_per_m2"));
    let summary = &json(&filtered.join("manifest.json"))["summary"];
    assert!(summary["lowpass_peak_to_peak_V2_per_m2"].as_f64().unwrap() > 0.0);
    assert_eq!(
        fs::read(plain.join("trace.csv")).unwrap(),
        fs::read(filtered.join("trace.csv")).unwrap()
    );
}

#[test]
fn split_leaves_unrequested_regions_empty() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("causal");
    let o = run(&["split", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--regions", "causal"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("result.json"));
    assert!(r["per_frequency"]["total"][0].is_null());
    assert!(r["per_frequency"]["noncausal"][0].is_null());
    assert!(r["per_frequency"]["causal"][0].is_number());
    assert_eq!(r["metadata"]["regions"], serde_json::json!(["causal"]));
}

#[test]
fn noncausal_part_dominates_at_one_terahertz() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("run");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("result.json"));
    let p = &r["per_frequency"];
    let i = p["freq_THz"].as_array().unwrap().iter().position(|f| f == 1.0).unwrap();
    let nc = p["noncausal"][i].as_f64().unwrap();
    let c = p["causal"][i].as_f64().unwrap();
    assert!(nc > c.abs(), "noncausal {nc} causal {c}");
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn trace_csv(scale: f64) -> String {
    let mut s = String::from("delta_t_fs,G_V2_per_m2\n");
    for i in 0..41 {
        let t = -1000.0 + 50.0 * i as f64;
        let g = scale * 5.0 * (-(t / 400.0_f64).powi(2)).exp() * (t / 150.0).cos();
        s.push_str(&format!("{t},{g}\n"));
    }
    s
}

#[test]
fn compare_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let sim = write(tmp.path(), "sim.csv", &trace_csv(1.0));
    let far = write(tmp.path(), "far.csv", &trace_csv(10.0));
    let out = tmp.path().join("cmp");
    let o = run(&["compare", sim.to_str().unwrap(), sim.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&out.join("comparison.json"));
    assert_eq!(report["kind"], "trace");
    assert_eq!(report["report"]["fraction_within_2sigma"], 1.0);

    let o = run(&["compare", sim.to_str().unwrap(), far.to_str().unwrap(), "--sigma", "1.05", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));

    // restricting to the tails, where both are small, agrees again
    let o = run(&[
        "compare",
        sim.to_str().unwrap(),
        far.to_str().unwrap(),
        "--band",
        "800:1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn compare_reports_bad_rows() {
    let tmp = TempDir::new().unwrap();
    let sim = write(tmp.path(), "sim.csv", &trace_csv(1.0));
    let bad = write(tmp.path(), "bad.csv", "delta_t_fs,G_V2_per_m2\n0,1\n20,oops\n40,2\n");
    let o = run(&["compare", sim.to_str().unwrap(), bad.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("bad.csv") && err.contains("line 3"), "{err}");

    let spec = write(tmp.path(), "s.csv", "freq_THz,G,err\n1,1,0.1\n2,2,0.1\n");
    let o = run(&["compare", sim.to_str().unwrap(), spec.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot compare"));
}

#[test]
fn dispersion_of_constant_table() {
    let tmp = TempDir::new().unwrap();
    let table = write(tmp.path(), "flat.csv", "freq_THz,n\n0.1,3.0\n1.0,3.0\n2.0,3.0\n5.0,3.0\n");
    let o = run(&["dispersion", table.to_str().unwrap(), "--freq", "1.0,2.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!((r[1] - 3.0).abs() < 1e-6 && (r[2] - 3.0).abs() < 1e-6, "{r:?}");
        // 50 μm at c/3
        let flight_fs = 50e-6 * 3.0 / 299_792_458.0 * 1e15;
        for col in 4..7 {
            assert!((r[col] - flight_fs).abs() < 1e-3, "{r:?}");
        }
    }
}

#[test]
fn dispersion_out_of_range() {
    let o = run(&["dispersion", "--freq", "12.0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("12 THz"), "{}", stderr(&o));
    let o = run(&["dispersion", "--freq", "1.0"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with(
        "freq_THz,n,n_g,cone_speed_um_per_ps,flight_phase_fs_over_50um,flight_group_fs_over_50um,flight_band_fs_over_50um\n"
    ));
}

#[test]
fn dispersion_table_from_config() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "flat.csv", "freq_THz,n\n0.1,3.1\n1.0,3.1\n2.0,3.1\n5.0,3.1\n");
    let mut text = SMALL.to_string();
    text.push_str("dispersion_table = \"flat.csv\"\n");
    let cfg = write(tmp.path(), "with_table.toml", &text);
    let out = tmp.path().join("run");
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("result.json"));
    assert!(r["metadata"]["dispersion_source"].as_str().unwrap().ends_with("flat.csv"));
}

#[test]
fn broken_table_named_in_error() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "short.csv", "freq_THz,n\n0.1,3.1\n5.0,3.1\n");
    let mut text = SMALL.to_string();
    text.push_str("dispersion_table = \"short.csv\"\n");
    let cfg = write(tmp.path(), "with_table.toml", &text);
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("short.csv"), "{}", stderr(&o));
}
