//! Physical constants and the handful of unit conversions used throughout.
//!
//! Internally every frequency is angular (rad/s), every length is in metres
//! and every time in seconds. Human-facing surfaces (config files, CSV
//! exports) use THz, fs, μm and mm.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// SI constants (CODATA 2018). `eps0` is derived from `mu0` and `c` so that
/// `c² ε₀ μ₀ = 1` holds to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Boltzmann constant, J/K.
    pub kb: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C: f64 = 299_792_458.0;
pub const MU0: f64 = 1.256_637_062_12e-6;
pub const EPS0: f64 = 1.0 / (MU0 * C * C);
pub const KB: f64 = 1.380_649e-23;

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        c: C,
        eps0: EPS0,
        mu0: MU0,
        kb: KB,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

const TERA: f64 = 1e12;

/// THz (cyclic) to rad/s.
pub fn thz_to_rad_per_s(value: f64) -> f64 {
    2.0 * PI * TERA * value
}

/// rad/s to THz (cyclic).
pub fn rad_per_s_to_thz(omega: f64) -> f64 {
    omega / (2.0 * PI * TERA)
}

// dividing by an exactly representable power of ten rounds once, so
// 50 μm becomes 5e-5 m rather than 4.9999999999999996e-5
pub fn fs_to_s(value: f64) -> f64 {
    value / 1e15
}

pub fn s_to_fs(value: f64) -> f64 {
    value * 1e15
}

pub fn um_to_m(value: f64) -> f64 {
    value / 1e6
}

pub fn m_to_um(value: f64) -> f64 {
    value * 1e6
}

pub fn mm_to_m(value: f64) -> f64 {
    value / 1e3
}

pub fn m_to_mm(value: f64) -> f64 {
    value * 1e3
}

/// Converts a spectral density per rad/s into the same density per THz.
pub fn per_rad_s_to_per_thz(density: f64) -> f64 {
    density * 2.0 * PI * TERA
}

pub fn per_thz_to_per_rad_s(density: f64) -> f64 {
    density / (2.0 * PI * TERA)
}
