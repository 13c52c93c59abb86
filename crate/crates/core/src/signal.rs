//! Processing of delay traces: apodisation, Wiener–Khinchin spectra, the
//! 3 THz low-pass and trace/spectrum comparison.
//!
//! CSV formats (UTF-8, '.' decimal, one header line):
//!
//! ```text
//! delta_t_fs,G_V2_per_m2[,sigma]
//! freq_THz,G[,err]
//! ```
//!
//! Spectra are two-sided densities in V²/m² per THz, so a trace is recovered
//! as `G(δt) = 2 ∫₀^∞ df cos(2πfδt) G(f)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::fs_to_s;

const SPACING_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    Hann,
    Tukey { alpha: f64 },
}

impl Default for Window {
    fn default() -> Self {
        Window::Tukey { alpha: 0.5 }
    }
}

impl Window {
    /// Window weights for `n` samples; symmetric, peak 1 at the centre.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        if n < 2 {
            return vec![1.0; n];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let x = i as f64 / last;
                match *self {
                    Window::Hann => 0.5 * (1.0 - (2.0 * PI * x).cos()),
                    Window::Tukey { alpha } => tukey(x, alpha),
                }
            })
            .collect()
    }
}

fn tukey(x: f64, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 1.0;
    }
    let alpha = alpha.min(1.0);
    let edge = 0.5 * alpha;
    if x < edge {
        0.5 * (1.0 - (PI * x / edge).cos())
    } else if x > 1.0 - edge {
        0.5 * (1.0 - (PI * (1.0 - x) / edge).cos())
    } else {
        1.0
    }
}

/// A delay trace on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeTrace {
    /// Delays in s.
    pub delays: Vec<f64>,
    /// V²/m².
    pub values: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    /// Window applied, if any.
    pub window: Option<Window>,
}

impl TimeTrace {
    pub fn new(delays: Vec<f64>, values: Vec<f64>, sigma: Option<Vec<f64>>) -> Result<Self> {
        if delays.len() != values.len() || sigma.as_ref().is_some_and(|s| s.len() != values.len()) {
            return Err(Error::Unsupported("trace columns differ in length".into()));
        }
        if delays.len() < 2 {
            return Err(Error::TooShort {
                found: delays.len(),
                required: 2,
            });
        }
        check_uniform(&delays)?;
        Ok(Self {
            delays,
            values,
            sigma,
            window: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.delays[self.len() - 1] - self.delays[0]) / (self.len() - 1) as f64
    }

    pub fn peak_to_peak(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Linear interpolation at `t`; `None` outside the grid.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        interpolate(&self.delays, &self.values, t)
    }

    /// Whether the grid is symmetric about δt = 0.
    fn is_symmetric(&self) -> bool {
        let n = self.len();
        let tol = SPACING_REL_TOL * self.spacing().abs() * n as f64;
        (0..n).all(|i| (self.delays[i] + self.delays[n - 1 - i]).abs() <= tol)
    }
}

/// A two-sided spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freqs_thz: Vec<f64>,
    /// V²/m² per THz.
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
}

impl Spectrum {
    pub fn new(freqs_thz: Vec<f64>, values: Vec<f64>, errors: Option<Vec<f64>>) -> Result<Self> {
        if freqs_thz.len() != values.len() || errors.as_ref().is_some_and(|e| e.len() != values.len()) {
            return Err(Error::Unsupported("spectrum columns differ in length".into()));
        }
        if let Some(i) = freqs_thz.iter().position(|f| !(*f >= 0.0)) {
            return Err(Error::Unsupported(format!("negative or invalid frequency at entry {i}")));
        }
        if let Some(i) = freqs_thz.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Unsupported(format!(
                "frequencies must increase (entry {})",
                i + 1
            )));
        }
        Ok(Self {
            freqs_thz,
            values,
            errors,
        })
    }

    /// Frequency and value of the largest entry.
    pub fn peak(&self) -> Option<(f64, f64)> {
        argmax(&self.values).map(|i| (self.freqs_thz[i], self.values[i]))
    }
}

fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

fn check_uniform(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Ok(());
    }
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonUniformSpacing { index: 1 });
    }
    for (i, w) in x.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > SPACING_REL_TOL * h.max(x[0].abs().max(x[x.len() - 1].abs())) {
            return Err(Error::NonUniformSpacing { index: i + 1 });
        }
    }
    Ok(())
}

fn interpolate(x: &[f64], y: &[f64], t: f64) -> Option<f64> {
    let n = x.len();
    if n == 0 || t < x[0] || t > x[n - 1] {
        return None;
    }
    let j = x.partition_point(|&v| v <= t);
    if j == 0 {
        return Some(y[0]);
    }
    if j >= n {
        return Some(y[n - 1]);
    }
    let (x0, x1) = (x[j - 1], x[j]);
    let s = (t - x0) / (x1 - x0);
    Some(y[j - 1] + s * (y[j] - y[j - 1]))
}

/// Pointwise multiplication by the window.
pub fn apodize(trace: &TimeTrace, window: Window) -> TimeTrace {
    let w = window.weights(trace.len());
    TimeTrace {
        delays: trace.delays.clone(),
        values: trace.values.iter().zip(&w).map(|(v, w)| v * w).collect(),
        sigma: trace
            .sigma
            .as_ref()
            .map(|s| s.iter().zip(&w).map(|(v, w)| v * w).collect()),
        window: Some(window),
    }
}

/// (2π)⁻¹ ∫dδt e^{iΩδt} G(δt) on the FFT grid up to Nyquist, in V²/m² per
/// THz. Traces on grids symmetric about zero are symmetrised first, so the
/// result is real; otherwise the real part is returned.
pub fn wiener_khinchin(trace: &TimeTrace) -> Result<Spectrum> {
    const MIN_LEN: usize = 8;
    if trace.len() < MIN_LEN {
        return Err(Error::TooShort {
            found: trace.len(),
            required: MIN_LEN,
        });
    }
    check_uniform(&trace.delays)?;
    let n = trace.len();
    let dt = trace.spacing();
    let values: Vec<f64> = if trace.is_symmetric() {
        (0..n).map(|i| 0.5 * (trace.values[i] + trace.values[n - 1 - i])).collect()
    } else {
        trace.values.clone()
    };
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let t0 = trace.delays[0];
    let bins = n / 2 + 1;
    let df_hz = 1.0 / (n as f64 * dt);
    let mut freqs = Vec::with_capacity(bins);
    let mut out = Vec::with_capacity(bins);
    for (k, x) in buf.iter().enumerate().take(bins) {
        let f_hz = k as f64 * df_hz;
        // e^{iΩt₀} restores the grid origin; Δt/(2π) per rad/s → Δt per Hz
        let phase = Complex::from_polar(1.0, 2.0 * PI * f_hz * t0);
        let per_hz = (phase * x).re * dt;
        freqs.push(f_hz * 1e-12);
        out.push(per_hz * 1e12);
    }
    Spectrum::new(freqs, out, None)
}

/// `G(δt) = df [S₀ + 2 Σ_{k≥1} S_k cos(2πf_kδt)]` over a uniform spectrum
/// starting at 0 THz. This inverts [`wiener_khinchin`] exactly on
/// odd-length grids symmetric about zero.
pub fn synthesize_trace(spectrum: &Spectrum, delays: &[f64]) -> Result<TimeTrace> {
    let f = &spectrum.freqs_thz;
    if f.len() < 2 {
        return Err(Error::TooShort {
            found: f.len(),
            required: 2,
        });
    }
    check_uniform(f)?;
    let df = f[1] - f[0];
    if f[0].abs() > 1e-9 * df {
        return Err(Error::Unsupported("synthesis needs a spectrum starting at 0 THz".into()));
    }
    let values = delays
        .iter()
        .map(|&t| {
            let s: f64 = f
                .iter()
                .zip(&spectrum.values)
                .enumerate()
                .map(|(k, (&fk, &v))| {
                    let w = if k == 0 { 1.0 } else { 2.0 };
                    w * v * (2.0 * PI * fk * 1e12 * t).cos()
                })
                .sum();
            df * s
        })
        .collect();
    TimeTrace::new(delays.to_vec(), values, None)
}

/// Zero-phase spectral mask: 1 below `f_pass`, 0 above `f_stop`, raised
/// cosine in between (frequencies in THz).
pub fn lowpass(trace: &TimeTrace, f_pass: f64, f_stop: f64) -> Result<TimeTrace> {
    check_uniform(&trace.delays)?;
    let n = trace.len();
    let dt = trace.spacing();
    let mask = |f_thz: f64| {
        if f_thz <= f_pass {
            1.0
        } else if f_thz >= f_stop {
            0.0
        } else {
            0.5 * (1.0 + (PI * (f_thz - f_pass) / (f_stop - f_pass)).cos())
        }
    };
    let filter = |values: &[f64]| {
        let mut planner = FftPlanner::new();
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut buf);
        for (k, x) in buf.iter_mut().enumerate() {
            let kk = k.min(n - k);
            *x *= mask(kk as f64 / (n as f64 * dt) * 1e-12);
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        buf.iter().map(|x| x.re / n as f64).collect::<Vec<f64>>()
    };
    Ok(TimeTrace {
        delays: trace.delays.clone(),
        values: filter(&trace.values),
        sigma: trace.sigma.clone(),
        window: trace.window,
    })
}

/// Low-pass with a raised-cosine roll-off from 2.8 to 3.2 THz.
pub fn lowpass_3thz(trace: &TimeTrace) -> Result<TimeTrace> {
    lowpass(trace, 2.8, 3.2)
}

/// A sampled curve for comparison: delays in fs or frequencies in THz.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl From<&TimeTrace> for Series {
    fn from(t: &TimeTrace) -> Self {
        Series {
            x: t.delays.iter().map(|d| d * 1e15).collect(),
            y: t.values.clone(),
            sigma: t.sigma.clone(),
        }
    }
}

impl From<&Spectrum> for Series {
    fn from(s: &Spectrum) -> Self {
        Series {
            x: s.freqs_thz.clone(),
            y: s.values.clone(),
            sigma: s.errors.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub abscissa: Vec<f64>,
    pub sim: Vec<f64>,
    pub exp: Vec<f64>,
    /// exp − sim.
    pub residuals: Vec<f64>,
    pub sigma: f64,
    pub fraction_within_2sigma: f64,
    pub sim_peak: Peak,
    pub exp_peak: Peak,
    pub band: Option<(f64, f64)>,
}

fn grid_spacing(x: &[f64]) -> f64 {
    if x.len() < 2 {
        f64::INFINITY
    } else {
        (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
    }
}

/// Residuals on the coarser of the two grids (the other is linearly
/// interpolated), the fraction of points within 2σ and both peaks. Per-point
/// uncertainties of either input add in quadrature to `sigma`.
pub fn compare(sim: &Series, exp: &Series, sigma: f64, band: Option<(f64, f64)>) -> Result<ComparisonReport> {
    let lo = sim.x.first().copied().unwrap_or(f64::NAN).max(exp.x.first().copied().unwrap_or(f64::NAN));
    let hi = sim.x.last().copied().unwrap_or(f64::NAN).min(exp.x.last().copied().unwrap_or(f64::NAN));
    let (lo, hi) = match band {
        Some((a, b)) => (lo.max(a), hi.min(b)),
        None => (lo, hi),
    };
    if !(lo <= hi) {
        return Err(Error::NoOverlap);
    }
    // the grid with the larger spacing hosts the comparison
    let sim_is_base = grid_spacing(&sim.x) >= grid_spacing(&exp.x);
    let (base, other) = if sim_is_base { (sim, exp) } else { (exp, sim) };
    let mut abscissa = Vec::new();
    let mut s_vals = Vec::new();
    let mut e_vals = Vec::new();
    let mut var_extra = Vec::new();
    for (i, &x) in base.x.iter().enumerate() {
        if x < lo || x > hi {
            continue;
        }
        let Some(o) = interpolate(&other.x, &other.y, x) else {
            continue;
        };
        let sb = base.sigma.as_ref().map_or(0.0, |s| s[i]);
        let so = other
            .sigma
            .as_ref()
            .and_then(|s| interpolate(&other.x, s, x))
            .unwrap_or(0.0);
        abscissa.push(x);
        var_extra.push(sb * sb + so * so);
        if sim_is_base {
            s_vals.push(base.y[i]);
            e_vals.push(o);
        } else {
            s_vals.push(o);
            e_vals.push(base.y[i]);
        }
    }
    if abscissa.is_empty() {
        return Err(Error::NoOverlap);
    }
    let residuals: Vec<f64> = e_vals.iter().zip(&s_vals).map(|(e, s)| e - s).collect();
    let within = residuals
        .iter()
        .zip(&var_extra)
        .filter(|(r, v)| r.abs() <= 2.0 * (sigma * sigma + **v).sqrt())
        .count();
    let peak = |x: &[f64], y: &[f64]| {
        let i = argmax(y).unwrap_or(0);
        Peak { at: x[i], value: y[i] }
    };
    Ok(ComparisonReport {
        sim_peak: peak(&abscissa, &s_vals),
        exp_peak: peak(&abscissa, &e_vals),
        fraction_within_2sigma: within as f64 / abscissa.len() as f64,
        abscissa,
        sim: s_vals,
        exp: e_vals,
        residuals,
        sigma,
        band,
    })
}

/// Numeric rows of a CSV with an exact header, 1-based line numbers in errors.
/// Numbered rows: (line, values).
type Rows = Vec<(usize, Vec<f64>)>;

fn parse_rows(text: &str, headers: &[&[&str]]) -> Result<(usize, Rows)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty input, expected a header".into(),
        });
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let Some(spec) = headers.iter().find(|h| h[..] == cols[..]) else {
        let expected: Vec<String> = headers.iter().map(|h| h.join(",")).collect();
        return Err(Error::Parse {
            line: hline + 1,
            column: 1,
            message: format!("header must be one of: {}", expected.join(" | ")),
        });
    };
    let width = spec.len();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        let mut column = 1;
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                column,
                message: format!("not a number: {:?}", f.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    column,
                    message: "value is not finite".into(),
                });
            }
            row.push(v);
            column += f.len() + 1;
        }
        rows.push((i + 1, row));
    }
    Ok((width, rows))
}

pub const TRACE_HEADER: &str = "delta_t_fs,G_V2_per_m2";
pub const SPECTRUM_HEADER: &str = "freq_THz,G,err";

/// Parses `delta_t_fs,G_V2_per_m2[,sigma]`.
pub fn parse_trace_csv(text: &str) -> Result<TimeTrace> {
    let (width, rows) = parse_rows(
        text,
        &[&["delta_t_fs", "G_V2_per_m2"], &["delta_t_fs", "G_V2_per_m2", "sigma"]],
    )?;
    if let Some(w) = rows.windows(2).find(|w| w[1].1[0] <= w[0].1[0]) {
        return Err(Error::Parse {
            line: w[1].0,
            column: 1,
            message: "delays must increase".into(),
        });
    }
    let delays = rows.iter().map(|(_, r)| fs_to_s(r[0])).collect();
    let values = rows.iter().map(|(_, r)| r[1]).collect();
    let sigma = (width == 3).then(|| rows.iter().map(|(_, r)| r[2]).collect());
    TimeTrace::new(delays, values, sigma)
}

/// Parses `freq_THz,G[,err]`.
pub fn parse_spectrum_csv(text: &str) -> Result<Spectrum> {
    let (width, rows) = parse_rows(text, &[&["freq_THz", "G"], &["freq_THz", "G", "err"]])?;
    if let Some((line, _)) = rows.iter().find(|(_, r)| r[0] < 0.0) {
        return Err(Error::Parse {
            line: *line,
            column: 1,
            message: "frequency must be non-negative".into(),
        });
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].1[0] <= w[0].1[0]) {
        return Err(Error::Parse {
            line: w[1].0,
            column: 1,
            message: "frequencies must increase".into(),
        });
    }
    let freqs = rows.iter().map(|(_, r)| r[0]).collect();
    let values = rows.iter().map(|(_, r)| r[1]).collect();
    let errors = (width == 3).then(|| rows.iter().map(|(_, r)| r[2]).collect());
    Spectrum::new(freqs, values, errors)
}

pub fn trace_to_csv(trace: &TimeTrace) -> String {
    let mut out = String::new();
    match &trace.sigma {
        Some(s) => {
            out.push_str(TRACE_HEADER);
            out.push_str(",sigma\n");
            for ((t, v), e) in trace.delays.iter().zip(&trace.values).zip(s) {
                let _ = writeln!(out, "{},{},{}", t * 1e15, v, e);
            }
        }
        None => {
            out.push_str(TRACE_HEADER);
            out.push('\n');
            for (t, v) in trace.delays.iter().zip(&trace.values) {
                let _ = writeln!(out, "{},{}", t * 1e15, v);
            }
        }
    }
    out
}

pub fn spectrum_to_csv(spectrum: &Spectrum) -> String {
    let mut out = String::new();
    let errors = spectrum.errors.clone().unwrap_or_else(|| vec![0.0; spectrum.values.len()]);
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for ((f, v), e) in spectrum.freqs_thz.iter().zip(&spectrum.values).zip(&errors) {
        let _ = writeln!(out, "{f},{v},{e}");
    }
    out
}
