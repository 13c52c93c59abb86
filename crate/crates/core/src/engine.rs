//! Evaluation of the single-mode EOS correlation G(Ω, δr⊥) and its causal
//! and non-causal parts.
//!
//! Spectral convention: the engine returns the two-sided density
//!
//! ```text
//! G(Ω) = ½ ∫d³Δr ∫dΔt K(Δr, Δt) C_Ω(Δr, Δt)
//! ```
//!
//! so that the delay trace is `G(δt) = 2 ∫₀^∞ dΩ cos(Ωδt) G(Ω)` and the two
//! are a Wiener–Khinchin pair, `G(Ω) = (2π)⁻¹ ∫dδt e^{iΩδt} G(δt)`.
//!
//! Real-space path: Δr is drawn exactly from the pair kernel with the
//! longitudinal separation stratified; for each draw the Δt-Gaussian is
//! integrated against `cos(ΩΔt)` analytically (total) or by Gauss–Legendre
//! on either side of the cone boundary |Δt| = n|Δr|/c (causal, non-causal).
//!
//! Momentum path: the same integral in plane waves,
//!
//! ```text
//! G(Ω) = ½ A(Ω) k/(16π²) e^{−Ω²σ_t²/2} cos β ∫₋₁¹du sinc(a₁L/2) sinc(a₂L/2)
//!        · e^{−k²(1−u²)σ_⊥²/2} ∫₀^{2π}dφ (1 − (1−u²)cos²φ) cos(k√(1−u²) δr⊥ cosφ)
//! ```
//!
//! with `a_i = ku − Ω n_{g,i}/c`, `σ_⊥²`, `σ_t²` the kernel variances and
//! `β = Ωδt − Ω(n_{g,1} − n_{g,2})L/(2c)`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{QuadratureSpec, Strategy};
use crate::error::{Error, Result};
use crate::lightcone::{ConeClassifier, SplitRegion};
use crate::probe::PairKernel;
use crate::quadrature::{Adaptive, GaussLegendre};
use crate::units::{rad_per_s_to_thz, C};
use crate::vacuum::{im_gxx_wavenumber, VacuumCorrelator};

/// Half-width of the Δt window in standard deviations.
const TIME_WINDOW_SIGMAS: f64 = 9.0;
const MOMENTUM_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnginePath {
    Realspace,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineResult {
    /// V²/m² per rad/s.
    pub value: f64,
    /// One-sigma statistical error (MC) or quadrature error estimate.
    pub stat_error: f64,
    pub neval: u64,
    pub path: EnginePath,
    pub converged: bool,
}

/// The three regions evaluated from common samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub total: EngineResult,
    pub causal: EngineResult,
    pub noncausal: EngineResult,
}

impl SplitResult {
    pub fn get(&self, region: SplitRegion) -> EngineResult {
        match region {
            SplitRegion::Total => self.total,
            SplitRegion::Causal => self.causal,
            SplitRegion::Noncausal => self.noncausal,
        }
    }

    /// |causal + noncausal − total| relative to the combined error bars.
    pub fn partition_residual(&self) -> (f64, f64) {
        let diff = (self.causal.value + self.noncausal.value - self.total.value).abs();
        let bound = (self.causal.stat_error.powi(2)
            + self.noncausal.stat_error.powi(2)
            + self.total.stat_error.powi(2))
        .sqrt();
        (diff, bound)
    }
}

fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// ∫_{x_a}^{x_b} φ(x) cos(θ + βx) dx for the standard normal density φ.
fn normal_cos_segment(xa: f64, xb: f64, theta: f64, beta: f64) -> f64 {
    if xb <= xa {
        return 0.0;
    }
    let h = if beta > 2.0 { 2.0 / beta } else { 1.0 };
    let panels = ((xb - xa) / h).ceil().max(1.0) as usize;
    gl10().integrate_composite(xa, xb, panels, |x| {
        INV_SQRT_2PI * (-0.5 * x * x).exp() * (theta + beta * x).cos()
    })
}

/// E[cos(ΩΔt)] for Δt ~ N(μ, s²): over all Δt, over the causal part
/// |Δt| ≥ T and over the non-causal part |Δt| < T.
pub(crate) fn cone_time_average(mu: f64, s: f64, omega: f64, t_cone: f64) -> [f64; 3] {
    let theta = omega * mu;
    let beta = omega * s;
    let total = theta.cos() * (-0.5 * beta * beta).exp();
    if s == 0.0 {
        let inside = mu.abs() < t_cone;
        return if inside { [total, 0.0, total] } else { [total, total, 0.0] };
    }
    let w = TIME_WINDOW_SIGMAS;
    // cone edges in standardised units
    let lo = (-t_cone - mu) / s;
    let hi = (t_cone - mu) / s;
    let noncausal = normal_cos_segment(lo.max(-w), hi.min(w), theta, beta);
    let causal = normal_cos_segment(-w, lo.min(w), theta, beta) + normal_cos_segment(hi.max(-w), w, theta, beta);
    [total, causal, noncausal]
}

fn inverse_normal(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * statrs::function::erf::erf_inv(2.0 * p - 1.0)
}

struct ModeContext {
    k: f64,
    cone_index: f64,
    half_prefactor: f64,
    sigma_t: f64,
}

impl ModeContext {
    fn new(pair: &PairKernel, corr: &VacuumCorrelator, cls: &ConeClassifier, omega: f64) -> Result<Self> {
        Ok(Self {
            k: corr.wavenumber(omega)?,
            cone_index: cls.dispersion.refractive_index(omega)?,
            half_prefactor: 0.5 * corr.spectral_prefactor(omega),
            sigma_t: pair.temporal_variance().sqrt(),
        })
    }

    /// Integrand contributions (total, causal, noncausal) at one separation.
    fn eval(&self, dr: [f64; 3], centre: f64, omega: f64) -> [f64; 3] {
        let rho = (dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2]).sqrt();
        let g = self.half_prefactor * im_gxx_wavenumber(dr, self.k);
        let t_cone = rho * self.cone_index / C;
        let avg = cone_time_average(centre, self.sigma_t, omega, t_cone);
        [g * avg[0], g * avg[1], g * avg[2]]
    }
}

/// All three regions of the real-space integral from one set of samples.
pub fn realspace_split(
    pair: &PairKernel,
    corr: &VacuumCorrelator,
    cls: &ConeClassifier,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<SplitResult> {
    let ctx = ModeContext::new(pair, corr, cls, omega)?;
    match spec.strategy {
        Strategy::StratifiedMc => Ok(stratified_mc(pair, &ctx, omega, spec)),
        Strategy::TensorQuadrature => Ok(tensor_quadrature(pair, &ctx, omega, spec)),
    }
}

/// ∫dΔt ∫d³Δr K·C_Ω·indicator(region), halved per the spectral convention.
pub fn g1_per_frequency_realspace(
    pair: &PairKernel,
    corr: &VacuumCorrelator,
    cls: &ConeClassifier,
    omega: f64,
    region: SplitRegion,
    spec: &QuadratureSpec,
) -> Result<EngineResult> {
    Ok(realspace_split(pair, corr, cls, omega, spec)?.get(region))
}

fn stratified_mc(pair: &PairKernel, ctx: &ModeContext, omega: f64, spec: &QuadratureSpec) -> SplitResult {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng.set_stream(spec.stream);
    let total_samples = spec.mc_samples.max(2);
    let strata = spec.strata.clamp(1, total_samples / 2);
    let base = total_samples / strata;
    let extra = total_samples % strata;

    let mut value = [0.0; 3];
    let mut variance = [0.0; 3];
    let mut perm: [Vec<usize>; 3] = Default::default();
    for h in 0..strata {
        let m = base + usize::from(h < extra);
        // two independent Latin hypercubes in (mean position, Δx, Δz); their
        // difference gives an unbiased variance for the stratum mean
        let mut half_means = [[0.0; 3]; 2];
        for (rep, size) in [m / 2, m - m / 2].into_iter().enumerate() {
            for p in perm.iter_mut() {
                p.clear();
                p.extend(0..size);
                p.shuffle(&mut rng);
            }
            let mut sum = [0.0; 3];
            for i in 0..size {
                let u = (h as f64 + rng.gen::<f64>()) / strata as f64;
                let mut lhs = [0.0; 3];
                for (v, p) in lhs.iter_mut().zip(&perm) {
                    *v = ((p[i] as f64 + rng.gen::<f64>()) / size as f64).clamp(1e-16, 1.0 - 1e-16);
                }
                let (dr, centre) = pair.separation_from(u, lhs[0], inverse_normal(lhs[1]), inverse_normal(lhs[2]));
                let f = ctx.eval(dr, centre, omega);
                for (acc, x) in sum.iter_mut().zip(f) {
                    *acc += x;
                }
            }
            for r in 0..3 {
                half_means[rep][r] = sum[r] / size as f64;
            }
        }
        for r in 0..3 {
            let (a, b) = (half_means[0][r], half_means[1][r]);
            value[r] += 0.5 * (a + b);
            variance[r] += 0.25 * (a - b) * (a - b);
        }
    }
    let h2 = (strata * strata) as f64;
    let make = |r: usize, scale: f64| {
        let v = value[r] / strata as f64;
        let e = (variance[r] / h2).sqrt();
        EngineResult {
            value: v,
            stat_error: e,
            neval: total_samples as u64,
            path: EnginePath::Realspace,
            converged: e <= spec.quad_rel_tol * scale,
        }
    };
    let scale = (value[0] / strata as f64).abs();
    SplitResult {
        total: make(0, scale),
        causal: make(1, scale),
        noncausal: make(2, scale),
    }
}

/// Deterministic product Gauss–Legendre over (Δx, Δz, Δy, Y). The error
/// estimate is the change from halving the Δy panel count.
fn tensor_quadrature(pair: &PairKernel, ctx: &ModeContext, omega: f64, spec: &QuadratureSpec) -> SplitResult {
    let l = pair.crystal_length();
    let kg = omega * pair.first.group_index.max(pair.second.group_index) / C;
    let panels = (((ctx.k + kg) * l / PI).ceil() as usize + 8).min(spec.max_subdivisions.max(2));
    let fine = tensor_sum(pair, ctx, omega, panels);
    let coarse = tensor_sum(pair, ctx, omega, panels.div_ceil(2));
    let neval = (panels + panels.div_ceil(2)) as u64 * 2 * 8 * TRANSVERSE_NODES as u64 * TRANSVERSE_NODES as u64;
    let scale = fine[0].abs();
    let make = |r: usize| {
        let e = (fine[r] - coarse[r]).abs();
        EngineResult {
            value: fine[r],
            stat_error: e,
            neval,
            path: EnginePath::Realspace,
            converged: e <= spec.quad_rel_tol * scale,
        }
    };
    SplitResult {
        total: make(0),
        causal: make(1),
        noncausal: make(2),
    }
}

const TRANSVERSE_NODES: usize = 32;

fn tensor_sum(pair: &PairKernel, ctx: &ModeContext, omega: f64, panels: usize) -> [f64; 3] {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let gt = RULE.get_or_init(|| GaussLegendre::new(TRANSVERSE_NODES));
    let l = pair.crystal_length();
    let sx = pair.transverse_variance().sqrt();
    let x0 = pair.delta_r_perp();
    let span = 8.0 * sx;
    let equal_speed = pair.first.group_index == pair.second.group_index;
    let mut out = [0.0; 3];
    // the triangular Δy density has a kink at zero
    for (a, b) in [(-l, 0.0), (0.0, l)] {
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let pa = a + p as f64 * h;
            for (ty, wy) in gl8().nodes_weights() {
                let dy = pa + 0.5 * h * (ty + 1.0);
                let wdy = 0.5 * h * wy * (l - dy.abs()) / (l * l);
                let ylo = 0.5 * dy.abs();
                let yhi = l - 0.5 * dy.abs();
                let centres: Vec<(f64, f64)> = if equal_speed {
                    vec![(pair.delay_centre(ylo - 0.5 * dy, ylo + 0.5 * dy), 1.0)]
                } else {
                    gl8()
                        .nodes_weights()
                        .map(|(t, w)| {
                            let ym = ylo + 0.5 * (yhi - ylo) * (t + 1.0);
                            (pair.delay_centre(ym - 0.5 * dy, ym + 0.5 * dy), 0.5 * w)
                        })
                        .collect()
                };
                for (tx, wx) in gt.nodes_weights() {
                    let dx = x0 + span * tx;
                    let gx = wx * span * gaussian_pdf(dx - x0, sx);
                    // Δz is symmetric: integrate [0, 8σ] and double
                    for (tz, wz) in gt.nodes_weights() {
                        let dz = 0.5 * span * (tz + 1.0);
                        let gz = wz * span * gaussian_pdf(dz, sx);
                        let weight = wdy * gx * gz;
                        for &(centre, wc) in &centres {
                            let f = ctx.eval([dx, dy, dz], centre, omega);
                            for r in 0..3 {
                                out[r] += weight * wc * f[r];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn gaussian_pdf(x: f64, sd: f64) -> f64 {
    INV_SQRT_2PI / sd * (-0.5 * (x / sd).powi(2)).exp()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// ∫₀^{2π} dφ (1 − s² cos²φ) cos(a cosφ) by the periodic trapezoid rule.
fn azimuthal_factor(s2: f64, a: f64) -> f64 {
    // Fourier content of cos(a cosφ) dies off beyond order |a| + O(|a|^⅓)
    let m = 4 * ((a.abs() + 40.0) / 4.0).ceil() as usize;
    let step = 2.0 * PI / m as f64;
    let mut sum = 0.0;
    for j in 0..m {
        let c = (j as f64 * step).cos();
        sum += (1.0 - s2 * c * c) * (a * c).cos();
    }
    sum * step
}

/// Plane-wave evaluation of the total region.
pub fn g1_per_frequency_momentum(pair: &PairKernel, corr: &VacuumCorrelator, omega: f64) -> Result<EngineResult> {
    momentum_with_tolerance(pair, corr, omega, MOMENTUM_REL_TOL)
}

pub fn momentum_with_tolerance(
    pair: &PairKernel,
    corr: &VacuumCorrelator,
    omega: f64,
    rel_tol: f64,
) -> Result<EngineResult> {
    let k = corr.wavenumber(omega)?;
    let l = pair.crystal_length();
    let kg1 = omega * pair.first.group_index / C;
    let kg2 = omega * pair.second.group_index / C;
    let var_x = pair.transverse_variance();
    let var_t = pair.temporal_variance();
    let dr = pair.delta_r_perp();

    let integrand = |u: f64| {
        let s2 = (1.0 - u * u).max(0.0);
        let pm = sinc(0.5 * (k * u - kg1) * l) * sinc(0.5 * (k * u - kg2) * l);
        let transverse = (-0.5 * k * k * s2 * var_x).exp();
        pm * transverse * azimuthal_factor(s2, k * s2.sqrt() * dr)
    };
    // phase matching puts the weight near u = n_g/n; break there
    let mut breaks = vec![-1.0];
    for u0 in [kg1 / k, kg2 / k] {
        if u0 > -1.0 && u0 < 1.0 && !breaks.contains(&u0) {
            breaks.push(u0);
        }
    }
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    let per_unit = (k * l / PI).ceil() + 8.0;
    let mut fine_breaks = Vec::new();
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) * 0.5 * per_unit).ceil().max(1.0) as usize;
        for i in 0..n {
            fine_breaks.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    fine_breaks.push(1.0);
    let q = Adaptive {
        rel_tol,
        abs_tol: 0.0,
        max_subdivisions: 200_000,
    };
    let r = q.integrate_breaks(&fine_breaks, integrand);

    let beta = omega * pair.delta_t() - omega * (pair.first.group_index - pair.second.group_index) * l / (2.0 * C);
    let outer = 0.5 * corr.spectral_prefactor(omega) * k / (16.0 * PI * PI)
        * (-0.5 * omega * omega * var_t).exp()
        * beta.cos();
    Ok(EngineResult {
        value: outer * r.value,
        stat_error: (outer * r.error).abs(),
        neval: r.evaluations as u64,
        path: EnginePath::Momentum,
        converged: r.converged,
    })
}

/// Checks Δ(Ω/2π) ≤ 1/(2·delay span).
pub fn check_grid_density(omegas: &[f64], delays: &[f64]) -> Result<()> {
    if omegas.len() < 2 {
        return Err(Error::GridTooCoarse(format!(
            "need at least 2 frequencies, got {}",
            omegas.len()
        )));
    }
    if delays.len() < 2 {
        return Err(Error::GridTooCoarse(format!(
            "need at least 2 delays, got {}",
            delays.len()
        )));
    }
    let span = delays.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - delays.iter().cloned().fold(f64::INFINITY, f64::min);
    let required_thz = 1e-12 / (2.0 * span);
    let spacing_thz = omegas
        .windows(2)
        .map(|w| rad_per_s_to_thz(w[1] - w[0]))
        .fold(0.0, f64::max);
    if spacing_thz > required_thz * (1.0 + 1e-9) {
        return Err(Error::GridTooCoarse(format!(
            "frequency spacing {spacing_thz:.4} THz exceeds {required_thz:.4} THz required by a {:.1} fs delay span",
            span * 1e15
        )));
    }
    Ok(())
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// G(δt) = 2 ∫ dΩ cos(Ωδt) G(Ω), trapezoid over the frequency grid.
pub fn g1_time_domain(omegas: &[f64], spectrum: &[f64], delays: &[f64]) -> Result<Vec<f64>> {
    if omegas.len() != spectrum.len() {
        return Err(Error::Unsupported(format!(
            "{} frequencies but {} spectral values",
            omegas.len(),
            spectrum.len()
        )));
    }
    check_grid_density(omegas, delays)?;
    let w = trapezoid_weights(omegas);
    Ok(delays
        .iter()
        .map(|&t| {
            2.0 * omegas
                .iter()
                .zip(spectrum)
                .zip(&w)
                .map(|((&om, &g), &wi)| wi * g * (om * t).cos())
                .sum::<f64>()
        })
        .collect())
}

/// |2 ∫ dΩ e^{−iΩδt} G(Ω)|: the envelope of the synthesised trace.
pub fn g1_envelope(omegas: &[f64], spectrum: &[f64], delays: &[f64]) -> Result<Vec<f64>> {
    check_grid_density(omegas, delays)?;
    let w = trapezoid_weights(omegas);
    Ok(delays
        .iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for ((&om, &g), &wi) in omegas.iter().zip(spectrum).zip(&w) {
                let (s, c) = (om * t).sin_cos();
                re += wi * g * c;
                im -= wi * g * s;
            }
            2.0 * re.hypot(im)
        })
        .collect())
}

/// Shared inputs of a sweep.
#[derive(Debug, Clone)]
pub struct EngineInputs {
    pub correlator: VacuumCorrelator,
    pub classifier: ConeClassifier,
}

impl EngineInputs {
    pub fn new(dispersion: Arc<crate::dispersion::DispersionModel>, temperature: f64) -> Self {
        Self {
            correlator: VacuumCorrelator::new(dispersion.clone(), temperature),
            classifier: ConeClassifier::new(dispersion),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionModel;
    use crate::units::thz_to_rad_per_s;

    fn inputs() -> EngineInputs {
        EngineInputs::new(Arc::new(DispersionModel::znte()), 4.0)
    }

    fn paper_pair() -> PairKernel {
        PairKernel::identical(10e-6, 195e-15, 3.24, 1e-3, 50e-6, 0.0)
    }

    #[test]
    fn time_average_matches_characteristic_function() {
        for (mu, s, w, t) in [(0.1e-12, 80e-15, 6e12, 0.3e-12), (-1e-12, 120e-15, 2e13, 0.9e-12), (0.0, 50e-15, 1e12, 0.0)] {
            let [total, c, nc] = cone_time_average(mu, s, w, t);
            assert!((c + nc - total).abs() < 1e-12, "{c} + {nc} != {total}");
        }
        // far inside the cone everything is non-causal
        let [total, c, nc] = cone_time_average(0.0, 50e-15, 6e12, 1e-9);
        assert!(c.abs() < 1e-15 && (nc - total).abs() < 1e-12);
    }

    #[test]
    fn sinc_at_zero() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1.0) - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn azimuthal_factor_closed_forms() {
        // a = 0 gives 2π(1 − s²/2); s = 0 gives 2π J0(a)
        assert!((azimuthal_factor(0.5, 0.0) - 2.0 * PI * 0.75).abs() < 1e-12);
        let j0_5 = -0.177_596_771_314_338_3;
        assert!((azimuthal_factor(0.0, 5.0) - 2.0 * PI * j0_5).abs() < 1e-12);
    }

    #[test]
    fn momentum_coincident_positive() {
        let e = inputs();
        let pair = PairKernel::identical(10e-6, 195e-15, 3.24, 1e-3, 0.0, 0.0);
        let r = g1_per_frequency_momentum(&pair, &e.correlator, thz_to_rad_per_s(1.0)).unwrap();
        assert!(r.value > 0.0 && r.converged);
    }

    #[test]
    fn split_partition_at_one_thz() {
        let e = inputs();
        let spec = QuadratureSpec {
            mc_samples: 20_000,
            ..Default::default()
        };
        let s = realspace_split(&paper_pair(), &e.correlator, &e.classifier, thz_to_rad_per_s(1.0), &spec).unwrap();
        let (diff, bound) = s.partition_residual();
        assert!(diff <= 2.0 * bound + 1e-12 * s.total.value.abs());
    }

    #[test]
    fn grid_density_check() {
        let om: Vec<f64> = (1..=50).map(|i| thz_to_rad_per_s(0.1 * i as f64)).collect();
        assert!(check_grid_density(&om, &[-2e-12, 2e-12]).is_ok());
        assert!(check_grid_density(&om, &[-20e-12, 20e-12]).is_err());
        assert!(matches!(check_grid_density(&om, &[0.0]), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn time_domain_is_even_and_line_is_cosine() {
        let om: Vec<f64> = (0..201).map(|i| thz_to_rad_per_s(0.9 + 0.001 * i as f64)).collect();
        let mut g = vec![0.0; om.len()];
        g[100] = 1.0;
        let delays: Vec<f64> = (-20..=20).map(|i| i as f64 * 50e-15).collect();
        let tr = g1_time_domain(&om, &g, &delays).unwrap();
        let w0 = om[100];
        let h = om[1] - om[0];
        for (t, v) in delays.iter().zip(&tr) {
            assert!((v - 2.0 * h * (w0 * t).cos()).abs() < 1e-12 * h);
        }
        for i in 0..delays.len() {
            assert_eq!(tr[i], tr[delays.len() - 1 - i]);
        }
    }
}
