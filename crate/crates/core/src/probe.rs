//! Space-time envelopes of the two probe pulses and their pair kernel.
//!
//! Each probe is a normalised intensity envelope: Gaussian in the transverse
//! plane (x, z), Gaussian in the co-moving time `t - t0 - y n_g / c`, and a
//! hard window `0 <= y <= L_c` along the propagation axis y.
//!
//! The pair kernel
//!
//! ```text
//! K(Δr, Δt) = ∫dT ∫d³R L₁(R − Δr/2, T − Δt/2) L₂(R + Δr/2, T + Δt/2)
//! ```
//!
//! collapses the double space-time integral onto the four relative
//! coordinates. Transverse and temporal factors are closed-form Gaussians;
//! the mean longitudinal coordinate is integrated by Gauss–Legendre.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::{erf, erf_inv};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::units::C;

pub type Vec3 = [f64; 3];

/// One probe pulse traversing the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeKernel {
    /// 1/e² intensity radius, m.
    pub waist: f64,
    /// Intensity FWHM, s.
    pub pulse_fwhm: f64,
    pub group_index: f64,
    pub crystal_length: f64,
    /// Centre x-position, m.
    pub transverse_offset: f64,
    /// Timing offset, s.
    pub delay: f64,
}

impl ProbeKernel {
    /// Standard deviation of the transverse intensity Gaussian (w/2).
    pub fn sigma_x(&self) -> f64 {
        0.5 * self.waist
    }

    /// Standard deviation of the temporal intensity Gaussian.
    pub fn sigma_t(&self) -> f64 {
        self.pulse_fwhm / (8.0 * LN_2).sqrt()
    }

    fn normalisation(&self) -> f64 {
        let transverse = 0.5 * PI * self.waist * self.waist;
        let temporal = self.pulse_fwhm * (PI / (4.0 * LN_2)).sqrt();
        1.0 / (transverse * temporal * self.crystal_length)
    }

    /// L(r, t) in 1/(m³·s).
    pub fn envelope(&self, r: Vec3, t: f64) -> f64 {
        let [x, y, z] = r;
        if !(0.0..=self.crystal_length).contains(&y) {
            return 0.0;
        }
        let dx = x - self.transverse_offset;
        let w2 = self.waist * self.waist;
        let transverse = (-2.0 * (dx * dx + z * z) / w2).exp();
        let tau = t - self.delay - y * self.group_index / C;
        let temporal = (-4.0 * LN_2 * tau * tau / (self.pulse_fwhm * self.pulse_fwhm)).exp();
        self.normalisation() * transverse * temporal
    }
}

fn gl64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

fn gaussian(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

/// Axis-aligned box in (Δx, Δy, Δz, Δt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl SupportBox {
    pub fn half_widths(&self) -> [f64; 4] {
        std::array::from_fn(|i| 0.5 * (self.hi[i] - self.lo[i]))
    }
}

/// The measured pair: probe 1 at the origin, probe 2 displaced by δr⊥ along
/// x and delayed by δt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKernel {
    pub first: ProbeKernel,
    pub second: ProbeKernel,
}

impl PairKernel {
    pub fn new(first: ProbeKernel, second: ProbeKernel) -> Result<Self> {
        if first.crystal_length != second.crystal_length {
            return Err(Error::MismatchedCrystal(first.crystal_length, second.crystal_length));
        }
        Ok(Self { first, second })
    }

    /// Two identical probes separated by `delta_r_perp` and `delta_t`.
    pub fn identical(
        waist: f64,
        pulse_fwhm: f64,
        group_index: f64,
        crystal_length: f64,
        delta_r_perp: f64,
        delta_t: f64,
    ) -> Self {
        let first = ProbeKernel {
            waist,
            pulse_fwhm,
            group_index,
            crystal_length,
            transverse_offset: 0.0,
            delay: 0.0,
        };
        let second = ProbeKernel {
            transverse_offset: delta_r_perp,
            delay: delta_t,
            ..first
        };
        Self { first, second }
    }

    pub fn from_config(cfg: &ExperimentConfig, delta_t: f64) -> Self {
        Self::identical(
            cfg.waist,
            cfg.pulse_fwhm,
            cfg.probe_group_index,
            cfg.crystal_length,
            cfg.delta_r_perp,
            delta_t,
        )
    }

    pub fn swapped(&self) -> Self {
        Self {
            first: self.second,
            second: self.first,
        }
    }

    pub fn delta_r_perp(&self) -> f64 {
        self.second.transverse_offset - self.first.transverse_offset
    }

    pub fn delta_t(&self) -> f64 {
        self.second.delay - self.first.delay
    }

    pub fn crystal_length(&self) -> f64 {
        self.first.crystal_length
    }

    /// Variance of Δx (and Δz) under K.
    pub fn transverse_variance(&self) -> f64 {
        self.first.sigma_x().powi(2) + self.second.sigma_x().powi(2)
    }

    /// Variance of Δt about its longitudinal-position-dependent centre.
    pub fn temporal_variance(&self) -> f64 {
        self.first.sigma_t().powi(2) + self.second.sigma_t().powi(2)
    }

    /// Centre of the Δt Gaussian for probe positions y (first) and y' (second).
    pub fn delay_centre(&self, y_first: f64, y_second: f64) -> f64 {
        self.delta_t() + (self.second.group_index * y_second - self.first.group_index * y_first) / C
    }

    /// Overlap interval of the mean longitudinal coordinate for a given Δy.
    fn mean_coordinate_window(&self, dy: f64) -> Option<(f64, f64)> {
        let l = self.crystal_length();
        let lo = (0.5 * dy).max(-0.5 * dy);
        let hi = (l + 0.5 * dy).min(l - 0.5 * dy);
        (hi > lo).then_some((lo, hi))
    }

    /// K(Δr, Δt) in 1/(m³·s).
    pub fn pair_kernel(&self, dr: Vec3, dt: f64) -> f64 {
        let [dx, dy, dz] = dr;
        let var_x = self.transverse_variance();
        let transverse = gaussian(dx, self.delta_r_perp(), var_x) * gaussian(dz, 0.0, var_x);
        if transverse == 0.0 {
            return 0.0;
        }
        let Some((lo, hi)) = self.mean_coordinate_window(dy) else {
            return 0.0;
        };
        let l = self.crystal_length();
        let var_t = self.temporal_variance();
        let longitudinal = gl64().integrate(lo, hi, |y_mean| {
            let centre = self.delay_centre(y_mean - 0.5 * dy, y_mean + 0.5 * dy);
            gaussian(dt, centre, var_t)
        }) / (l * l);
        transverse * longitudinal
    }

    /// Maps variates to a separation drawn from K and the centre of the
    /// conditional Δt Gaussian: `u_dy` and `u_mean` uniform on [0, 1),
    /// `nx`, `nz` standard normal.
    pub fn separation_from(&self, u_dy: f64, u_mean: f64, nx: f64, nz: f64) -> (Vec3, f64) {
        let l = self.crystal_length();
        // Δy = y' − y of two uniforms on [0, L]: triangular on [−L, L]
        let dy = if u_dy < 0.5 {
            l * ((2.0 * u_dy).sqrt() - 1.0)
        } else {
            l * (1.0 - (2.0 * (1.0 - u_dy)).sqrt())
        };
        let y_mean = 0.5 * dy.abs() + u_mean * (l - dy.abs());
        let sx = self.transverse_variance().sqrt();
        let dx = self.delta_r_perp() + sx * nx;
        let dz = sx * nz;
        let centre = self.delay_centre(y_mean - 0.5 * dy, y_mean + 0.5 * dy);
        ([dx, dy, dz], centre)
    }

    /// Draws Δr exactly from K together with the centre of the conditional
    /// Δt Gaussian. The uniform variate that sets Δy is supplied by the
    /// caller so it can be stratified.
    pub fn sample_separation<R: Rng + ?Sized>(&self, u_dy: f64, rng: &mut R) -> (Vec3, f64) {
        let u_mean = rng.gen::<f64>();
        let nx: f64 = rng.sample(StandardNormal);
        let nz: f64 = rng.sample(StandardNormal);
        self.separation_from(u_dy, u_mean, nx, nz)
    }

    /// Draws (Δr, Δt) exactly from K with a caller-supplied Δy variate.
    pub fn sample_with<R: Rng + ?Sized>(&self, u_dy: f64, rng: &mut R) -> (Vec3, f64) {
        let (dr, centre) = self.sample_separation(u_dy, rng);
        let nt: f64 = rng.sample(StandardNormal);
        (dr, centre + self.temporal_variance().sqrt() * nt)
    }

    /// Draws (Δr, Δt) from K.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec3, f64) {
        let u = rng.gen::<f64>();
        self.sample_with(u, rng)
    }

    /// Axis-aligned box holding at least `containment` of K's mass.
    ///
    /// Δy is bounded exactly by ±L_c. The three Gaussian directions (Δx, Δz,
    /// and Δt about its centre) each get the central quantile
    /// `containment^(1/3)`; the Δt extent is widened by the full range of the
    /// Δt centre over the crystal.
    pub fn kernel_support(&self, containment: f64) -> Result<SupportBox> {
        if !(containment > 0.0 && containment < 1.0) {
            return Err(Error::InvalidContainment(containment));
        }
        let per_axis = containment.powf(1.0 / 3.0);
        let z = std::f64::consts::SQRT_2 * erf_inv(per_axis);
        let sx = self.transverse_variance().sqrt();
        let st = self.temporal_variance().sqrt();
        let l = self.crystal_length();
        let dt_lo = self.delta_t() - self.first.group_index * l / C - z * st;
        let dt_hi = self.delta_t() + self.second.group_index * l / C + z * st;
        Ok(SupportBox {
            lo: [self.delta_r_perp() - z * sx, -l, -z * sx, dt_lo],
            hi: [self.delta_r_perp() + z * sx, l, z * sx, dt_hi],
        })
    }

    /// Mass of K inside an axis-aligned box, by Gauss–Legendre over Δy and
    /// error functions in the Gaussian directions.
    pub fn box_mass(&self, b: &SupportBox) -> f64 {
        let sx = self.transverse_variance().sqrt();
        let st = self.temporal_variance().sqrt();
        let normal_mass = |lo: f64, hi: f64, mean: f64, sd: f64| {
            0.5 * (erf((hi - mean) / (sd * std::f64::consts::SQRT_2))
                - erf((lo - mean) / (sd * std::f64::consts::SQRT_2)))
        };
        let mx = normal_mass(b.lo[0], b.hi[0], self.delta_r_perp(), sx);
        let mz = normal_mass(b.lo[2], b.hi[2], 0.0, sx);
        let l = self.crystal_length();
        let gl = gl64();
        // integrate over (Δy, Y); the Δy density is piecewise linear with a kink at 0
        let dy_lo = b.lo[1].max(-l);
        let dy_hi = b.hi[1].min(l);
        let mut my = 0.0;
        for (a, c) in [(dy_lo, dy_hi.min(0.0)), (dy_lo.max(0.0), dy_hi)] {
            if c <= a {
                continue;
            }
            my += gl.integrate_composite(a, c, 8, |dy| {
                let Some((ylo, yhi)) = self.mean_coordinate_window(dy) else {
                    return 0.0;
                };
                gl.integrate(ylo, yhi, |ym| {
                    let centre = self.delay_centre(ym - 0.5 * dy, ym + 0.5 * dy);
                    normal_mass(b.lo[3], b.hi[3], centre, st)
                }) / (l * l)
            });
        }
        mx * mz * my
    }
}
