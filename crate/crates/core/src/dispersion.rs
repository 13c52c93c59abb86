//! Tabulated THz refractive index with natural cubic spline interpolation.
//!
//! Tables are CSV with a `freq_THz,n` header. The bundled ZnTe table covers
//! 0.1–5 THz on a 0.05 THz grid.

use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{rad_per_s_to_thz, thz_to_rad_per_s, C};

/// Bundled ZnTe THz refractive-index table.
pub const ZNTE_TABLE: &str = include_str!("../data/znte_thz.csv");

const MIN_SAMPLES: usize = 4;

/// Real refractive index n(Ω) over a finite validity range.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    omegas: Vec<f64>,
    indices: Vec<f64>,
    // spline second derivatives d²n/dΩ² at the nodes
    second: Vec<f64>,
}

impl DispersionModel {
    /// Builds a model from samples in rad/s. Samples are sorted and exact
    /// duplicates dropped; conflicting duplicates are rejected.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        let mut rows: Vec<(usize, f64, f64)> = samples
            .iter()
            .enumerate()
            .map(|(i, &(w, n))| (i + 1, w, n))
            .collect();
        for &(line, w, n) in &rows {
            if !w.is_finite() || !n.is_finite() || w <= 0.0 {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("invalid sample ({w}, {n})"),
                });
            }
            if n < 1.0 {
                return Err(Error::NonPhysicalIndex { line, n });
            }
        }
        rows.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut omegas: Vec<f64> = Vec::with_capacity(rows.len());
        let mut indices: Vec<f64> = Vec::with_capacity(rows.len());
        for (line, w, n) in rows {
            if let Some(&last) = omegas.last() {
                if w == last {
                    if n == *indices.last().unwrap() {
                        continue;
                    }
                    return Err(Error::Parse {
                        line,
                        column: 1,
                        message: format!("conflicting duplicate frequency {w:e} rad/s"),
                    });
                }
            }
            omegas.push(w);
            indices.push(n);
        }
        if omegas.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                found: omegas.len(),
                required: MIN_SAMPLES,
            });
        }
        let second = natural_spline_second_derivatives(&omegas, &indices);
        Ok(Self {
            omegas,
            indices,
            second,
        })
    }

    /// Constant index over [omega_min, omega_max]; used as the vacuum-like
    /// fallback and in tests.
    pub fn constant(n: f64, omega_min: f64, omega_max: f64) -> Result<Self> {
        let samples: Vec<(f64, f64)> = (0..MIN_SAMPLES)
            .map(|i| {
                let t = i as f64 / (MIN_SAMPLES - 1) as f64;
                (omega_min + t * (omega_max - omega_min), n)
            })
            .collect();
        Self::from_samples(&samples)
    }

    /// The bundled ZnTe table.
    pub fn znte() -> Self {
        parse_dispersion_csv(ZNTE_TABLE).expect("bundled ZnTe table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_dispersion_csv(&text)
    }

    /// Validity range in rad/s.
    pub fn range(&self) -> (f64, f64) {
        (self.omegas[0], *self.omegas.last().unwrap())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omegas.iter().copied().zip(self.indices.iter().copied())
    }

    fn check(&self, omega: f64) -> Result<()> {
        let (min, max) = self.range();
        if omega.is_finite() && omega >= min && omega <= max {
            Ok(())
        } else {
            Err(Error::OutOfRange { omega, min, max })
        }
    }

    fn segment(&self, omega: f64) -> usize {
        let i = self.omegas.partition_point(|&w| w <= omega);
        i.saturating_sub(1).min(self.omegas.len() - 2)
    }

    /// Spline value and first derivative at `omega` (must be in range).
    fn eval(&self, omega: f64) -> (f64, f64) {
        let i = self.segment(omega);
        let (x0, x1) = (self.omegas[i], self.omegas[i + 1]);
        let (y0, y1) = (self.indices[i], self.indices[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let h = x1 - x0;
        let a = (x1 - omega) / h;
        let b = (omega - x0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let slope = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        (value, slope)
    }

    /// n(Ω).
    pub fn refractive_index(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        if let Ok(i) = self.omegas.binary_search_by(|w| w.total_cmp(&omega)) {
            return Ok(self.indices[i]);
        }
        Ok(self.eval(omega).0)
    }

    /// dn/dΩ from the analytic derivative of the interpolant, in s/rad.
    pub fn index_derivative(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        Ok(self.eval(omega).1)
    }

    /// Group index n + Ω dn/dΩ.
    pub fn group_index(&self, omega: f64) -> Result<f64> {
        let n = self.refractive_index(omega)?;
        Ok(n + omega * self.eval(omega).1)
    }

    /// Phase velocity c/n(Ω), the per-mode light-cone aperture.
    pub fn cone_speed(&self, omega: f64) -> Result<f64> {
        Ok(C / self.refractive_index(omega)?)
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations, M_0 = M_{n-1} = 0.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

/// Parses a `freq_THz,n` CSV table.
pub fn parse_dispersion_csv(text: &str) -> Result<DispersionModel> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing header `freq_THz,n`".into(),
        });
    };
    let cols: Vec<&str> = header.trim().trim_start_matches('\u{feff}').split(',').map(str::trim).collect();
    if cols != ["freq_THz", "n"] {
        return Err(Error::Parse {
            line: hline + 1,
            column: 1,
            message: format!("expected header `freq_THz,n`, found `{}`", header.trim()),
        });
    }
    let mut samples = Vec::new();
    let mut line_of = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                column: fields.len().min(2) + 1,
                message: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let mut vals = [0.0; 2];
        for (c, f) in fields.iter().enumerate() {
            vals[c] = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    column: c + 1,
                    message: format!("not a finite number: `{f}`"),
                })?;
        }
        if vals[0] <= 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                column: 1,
                message: "frequency must be positive".into(),
            });
        }
        if vals[1] < 1.0 {
            return Err(Error::NonPhysicalIndex {
                line: idx + 1,
                n: vals[1],
            });
        }
        samples.push((thz_to_rad_per_s(vals[0]), vals[1]));
        line_of.push(idx + 1);
    }
    DispersionModel::from_samples(&samples).map_err(|e| match e {
        // report file line numbers rather than sample positions
        Error::Parse { line, column, message } => Error::Parse {
            line: line_of.get(line - 1).copied().unwrap_or(line),
            column,
            message,
        },
        other => other,
    })
}

/// Flight time across `distance` at the phase, group, or an arbitrary index.
pub fn flight_time(distance: f64, index: f64) -> f64 {
    distance * index / C
}

/// Convenience for reports: n, n_g and c/n at a frequency given in THz.
pub fn describe(model: &DispersionModel, freq_thz: f64) -> Result<(f64, f64, f64)> {
    let w = thz_to_rad_per_s(freq_thz);
    Ok((model.refractive_index(w)?, model.group_index(w)?, model.cone_speed(w)?))
}

/// Validity range in THz.
pub fn range_thz(model: &DispersionModel) -> (f64, f64) {
    let (a, b) = model.range();
    (rad_per_s_to_thz(a), rad_per_s_to_thz(b))
}
