//! Per-frequency two-point correlators of the x-polarised field in a bulk,
//! lossless, dispersive medium.
//!
//! The symmetrised correlator follows the fluctuation–dissipation form
//!
//! ```text
//! C_Ω(Δr, Δt) = (2ħμ₀/π) Ω² Im G_xx(Δr, Ω) coth(ħΩ / 2k_BT) cos(ΩΔt)
//! ```
//!
//! so that `⟨{Ê_x, Ê_x}⟩(Δr, Δt) = ∫₀^∞ dΩ C_Ω(Δr, Δt)`. The commutator
//! kernel swaps `cos → sin` and drops the thermal factor.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dispersion::DispersionModel;
use crate::error::Result;
use crate::probe::Vec3;
use crate::units::PhysicalConstants;

const SERIES_THRESHOLD: f64 = 1e-3;

/// Im G_xx of the homogeneous-medium dyadic Green's tensor, in 1/m.
///
/// With k = nΩ/c, ρ = |Δr| and u = kρ:
/// `Im{ e^{iu}/(4πρ) [ (1 + i/u − 1/u²) + (−1 − 3i/u + 3/u²) (Δx/ρ)² ] }`.
/// Below u = 1e-3 a Taylor series replaces the closed form, whose terms
/// cancel catastrophically there; at ρ = 0 the value is k/(6π).
pub fn green_tensor_im_xx(dr: Vec3, omega: f64, n: f64) -> f64 {
    let k = n * omega / PhysicalConstants::SI.c;
    im_gxx_wavenumber(dr, k)
}

pub(crate) fn im_gxx_wavenumber(dr: Vec3, k: f64) -> f64 {
    let rho2 = dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2];
    let rho = rho2.sqrt();
    let u = k * rho;
    let cos2 = if rho2 > 0.0 { dr[0] * dr[0] / rho2 } else { 0.0 };
    let (f1, f2) = if u < SERIES_THRESHOLD {
        im_gxx_series(u)
    } else {
        im_gxx_closed(u)
    };
    k / (4.0 * PI) * (f1 + cos2 * f2)
}

/// Isotropic and longitudinal parts, each divided by u.
fn im_gxx_closed(u: f64) -> (f64, f64) {
    let (s, c) = u.sin_cos();
    let inv = 1.0 / u;
    let inv2 = inv * inv;
    let f1 = ((1.0 - inv2) * s + c * inv) * inv;
    let f2 = ((-1.0 + 3.0 * inv2) * s - 3.0 * c * inv) * inv;
    (f1, f2)
}

fn im_gxx_series(u: f64) -> (f64, f64) {
    let u2 = u * u;
    let f1 = 2.0 / 3.0 + u2 * (-2.0 / 15.0 + u2 * (1.0 / 140.0 - u2 / 5670.0));
    let f2 = u2 * (1.0 / 15.0 + u2 * (-1.0 / 210.0 + u2 / 7560.0));
    (f1, f2)
}

/// coth(ħΩ / 2k_BT); exactly 1 at T = 0.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    let k = PhysicalConstants::SI;
    if temperature <= 0.0 {
        return 1.0;
    }
    let x = k.hbar * omega / (2.0 * k.kb * temperature);
    if x > 20.0 {
        // coth(x) = 1 + 2e^{-2x} + O(e^{-4x})
        1.0 + 2.0 * (-2.0 * x).exp()
    } else {
        1.0 / x.tanh()
    }
}

/// Symmetrised and antisymmetrised correlators of Ê_x in the medium.
#[derive(Debug, Clone)]
pub struct VacuumCorrelator {
    pub dispersion: Arc<DispersionModel>,
    /// Kelvin.
    pub temperature: f64,
}

impl VacuumCorrelator {
    pub fn new(dispersion: Arc<DispersionModel>, temperature: f64) -> Self {
        Self {
            dispersion,
            temperature,
        }
    }

    /// (2ħμ₀/π) Ω² coth(ħΩ/2k_BT): everything in C_Ω except Im G and the
    /// temporal phase.
    pub fn spectral_prefactor(&self, omega: f64) -> f64 {
        vacuum_prefactor(omega) * thermal_factor(omega, self.temperature)
    }

    /// Medium wavenumber nΩ/c.
    pub fn wavenumber(&self, omega: f64) -> Result<f64> {
        Ok(self.dispersion.refractive_index(omega)? * omega / PhysicalConstants::SI.c)
    }

    /// C_Ω(Δr, Δt) in V²/m² per rad/s.
    pub fn anticommutator(&self, dr: Vec3, dt: f64, omega: f64) -> Result<f64> {
        let k = self.wavenumber(omega)?;
        Ok(self.spectral_prefactor(omega) * im_gxx_wavenumber(dr, k) * (omega * dt).cos())
    }

    /// State-independent commutator counterpart, `cos → sin`, coth → 1.
    pub fn commutator_kernel(&self, dr: Vec3, dt: f64, omega: f64) -> Result<f64> {
        let k = self.wavenumber(omega)?;
        Ok(vacuum_prefactor(omega) * im_gxx_wavenumber(dr, k) * (omega * dt).sin())
    }
}

/// (2ħμ₀/π) Ω².
pub fn vacuum_prefactor(omega: f64) -> f64 {
    let k = PhysicalConstants::SI;
    2.0 * k.hbar * k.mu0 / PI * omega * omega
}

/// Frequency-integrated commutator of a non-dispersive medium with a
/// Gaussian spectral cutoff `exp(−(Ω/Ω_c)²)`.
pub fn broadband_commutator(dr: Vec3, dt: f64, n: f64, cutoff: f64) -> f64 {
    use crate::quadrature::Adaptive;
    let c = PhysicalConstants::SI.c;
    let rho = (dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2]).sqrt();
    let upper = 8.0 * cutoff;
    // resolve the fastest phase (ρn/c + |Δt|) Ω with ~4 panels per cycle
    let phase_rate = rho * n / c + dt.abs();
    let panels = ((upper * phase_rate / (2.0 * PI)) * 4.0).ceil() as usize + 16;
    let q = Adaptive {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_subdivisions: 200_000,
    };
    q.integrate(0.0, upper, panels, |w| {
        let k = n * w / c;
        vacuum_prefactor(w) * im_gxx_wavenumber(dr, k) * (w * dt).sin() * (-(w / cutoff).powi(2)).exp()
    })
    .value
}
