//! Property tests for the invariants of the kernel, correlator, split and
//! signal stages.

use std::sync::Arc;

use proptest::prelude::*;

use vacuumcone::engine::{realspace_split, EngineInputs};
use vacuumcone::signal::{
    compare, lowpass_3thz, parse_trace_csv, synthesize_trace, trace_to_csv, wiener_khinchin, Series,
};
use vacuumcone::units::{thz_to_rad_per_s, C};
use vacuumcone::{DispersionModel, PairKernel, ProbeKernel, QuadratureSpec, Spectrum, TimeTrace, VacuumCorrelator};

fn znte() -> Arc<DispersionModel> {
    Arc::new(DispersionModel::znte())
}

fn pair(dr: f64, dt: f64) -> PairKernel {
    PairKernel::identical(10e-6, 195e-15, 3.24, 1e-3, dr, dt)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_depends_on_relative_delay_only(
        shift in -5e-12f64..5e-12,
        dx in -2e-5f64..6e-5, dy in -9e-4f64..9e-4, dz in -2e-5f64..2e-5,
        lag in -3e-12f64..3e-12,
    ) {
        let base = pair(20e-6, 0.3e-12);
        let mut moved = base;
        moved.first.delay += shift;
        moved.second.delay += shift;
        let a = base.pair_kernel([dx, dy, dz], lag);
        let b = moved.pair_kernel([dx, dy, dz], lag);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300));
    }

    #[test]
    fn swapping_probes_reflects_the_kernel(
        dx in -2e-5f64..6e-5, dy in -9e-4f64..9e-4, dz in -2e-5f64..2e-5, lag in -6e-12f64..6e-12,
    ) {
        let p = pair(20e-6, 0.3e-12);
        let a = p.pair_kernel([dx, dy, dz], lag);
        let b = p.swapped().pair_kernel([-dx, -dy, -dz], -lag);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300));
    }

    #[test]
    fn zero_lag_kernel_falls_with_separation(w_um in 5.0f64..20.0, extra in 0.0f64..5.0) {
        // K at Δr = 0 as the beams part beyond four waists
        let kernel_at = |dr: f64| PairKernel::identical(w_um * 1e-6, 195e-15, 3.24, 1e-3, dr, 0.0)
            .pair_kernel([0.0; 3], 0.0);
        let near = 4.0 * w_um * 1e-6 * (1.0 + extra);
        prop_assert!(kernel_at(near * 1.1) < kernel_at(near));
        prop_assert!(kernel_at(near) < 1e-6 * kernel_at(0.0));
    }

    #[test]
    fn anticommutator_even_commutator_odd(
        x in -1e-4f64..1e-4, y in -1e-4f64..1e-4, z in -1e-4f64..1e-4,
        dt in 0.0f64..3e-12, f in 0.1f64..5.0,
    ) {
        let corr = VacuumCorrelator::new(znte(), 4.0);
        let w = thz_to_rad_per_s(f);
        let a = corr.anticommutator([x, y, z], dt, w).unwrap();
        let b = corr.anticommutator([x, y, z], -dt, w).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        let c = corr.commutator_kernel([x, y, z], dt, w).unwrap();
        let d = corr.commutator_kernel([x, y, z], -dt, w).unwrap();
        prop_assert!((c + d).abs() <= 1e-14 * c.abs().max(1e-300));
    }

    #[test]
    fn warmer_never_smaller(t1 in 0.0f64..300.0, dt in 0.0f64..300.0, f in 0.1f64..5.0) {
        let w = thz_to_rad_per_s(f);
        let at = |t: f64| VacuumCorrelator::new(znte(), t).anticommutator([0.0; 3], 0.0, w).unwrap();
        prop_assert!(at(t1 + dt) >= at(t1));
        prop_assert!(at(t1) >= at(0.0));
    }

    #[test]
    fn compare_is_symmetric(
        ys in proptest::collection::vec(-10.0f64..10.0, 20),
        offset in -3.0f64..3.0,
        sigma in 0.1f64..5.0,
    ) {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 10.0).collect();
        let a = Series { x: x.clone(), y: ys.clone(), sigma: None };
        let b = Series { x, y: ys.iter().map(|v| v + offset).collect(), sigma: None };
        let ab = compare(&a, &b, sigma, None).unwrap();
        let ba = compare(&b, &a, sigma, None).unwrap();
        prop_assert_eq!(ab.fraction_within_2sigma, ba.fraction_within_2sigma);
        for (r, s) in ab.residuals.iter().zip(&ba.residuals) {
            prop_assert!((r + s).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_csv_round_trips(ys in proptest::collection::vec(-1e3f64..1e3, 2..60), step in 1.0f64..50.0) {
        let delays: Vec<f64> = (0..ys.len()).map(|i| (i as f64 * step - 100.0) * 1e-15).collect();
        let t = TimeTrace::new(delays, ys, None).unwrap();
        let back = parse_trace_csv(&trace_to_csv(&t)).unwrap();
        for (a, b) in t.values.iter().zip(&back.values) {
            prop_assert_eq!(a, b);
        }
        for (a, b) in t.delays.iter().zip(&back.delays) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-15));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn split_adds_up(
        dr_um in 0.0f64..120.0, lag_fs in -500.0f64..500.0, f in 0.2f64..4.8, seed in any::<u64>(),
    ) {
        let inputs = EngineInputs::new(znte(), 4.0);
        let spec = QuadratureSpec { mc_samples: 10_000, rng_seed: seed, ..QuadratureSpec::default() };
        let s = realspace_split(
            &pair(dr_um * 1e-6, lag_fs * 1e-15),
            &inputs.correlator,
            &inputs.classifier,
            thz_to_rad_per_s(f),
            &spec,
        )
        .unwrap();
        let (diff, bound) = s.partition_residual();
        prop_assert!(diff <= 2.0 * bound + 1e-12 * s.total.value.abs());
        prop_assert!(s.total.stat_error >= 0.0 && s.total.stat_error.is_finite());
    }

    #[test]
    fn band_limited_traces_survive_spectral_round_trip(
        amps in proptest::collection::vec(-2.0f64..2.0, 1..6),
    ) {
        // cosines on exact frequency bins of a symmetric, odd-length grid
        let n = 201;
        let dt = 20e-15;
        let delays: Vec<f64> = (0..n).map(|i| (i as f64 - 100.0) * dt).collect();
        let df = 1.0 / (n as f64 * dt);
        let values: Vec<f64> = delays
            .iter()
            .map(|&t| {
                amps.iter()
                    .enumerate()
                    .map(|(j, a)| a * (2.0 * std::f64::consts::PI * (3 * j + 2) as f64 * df * t).cos())
                    .sum()
            })
            .collect();
        let trace = TimeTrace::new(delays.clone(), values, None).unwrap();
        let spectrum: Spectrum = wiener_khinchin(&trace).unwrap();
        let back = synthesize_trace(&spectrum, &delays).unwrap();
        let scale = trace.values.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
        for (a, b) in trace.values.iter().zip(&back.values) {
            prop_assert!((a - b).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn lowpass_is_idempotent_away_from_rolloff(
        amps in proptest::collection::vec(-5.0f64..5.0, 8),
        bins in proptest::collection::vec(0usize..50, 8),
    ) {
        // the second pass only re-attenuates content inside 2.8–3.2 THz, so
        // the trace is built from bins outside that band
        let n = 201;
        let dt = 20e-15;
        let df = 1.0 / (n as f64 * dt) * 1e-12;
        let delays: Vec<f64> = (0..n).map(|i| (i as f64 - 100.0) * dt).collect();
        let tones: Vec<(f64, f64)> = amps
            .iter()
            .zip(&bins)
            .map(|(&a, &b)| (a, b as f64 * df))
            .filter(|&(_, f)| !(2.7..=3.3).contains(&f))
            .collect();
        let values: Vec<f64> = delays
            .iter()
            .map(|&t| tones.iter().map(|(a, f)| a * (2.0 * std::f64::consts::PI * f * 1e12 * t).cos()).sum())
            .collect();
        let t = TimeTrace::new(delays, values, None).unwrap();
        let once = lowpass_3thz(&t).unwrap();
        let twice = lowpass_3thz(&once).unwrap();
        let scale = t.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in once.values.iter().zip(&twice.values) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn probe_envelope_is_causal_in_crystal(y in -1e-3f64..2e-3, t in -1e-12f64..2e-11) {
        let p = ProbeKernel {
            waist: 10e-6,
            pulse_fwhm: 195e-15,
            group_index: 3.24,
            crystal_length: 1e-3,
            transverse_offset: 0.0,
            delay: 0.0,
        };
        let v = p.envelope([0.0, y, 0.0], t);
        prop_assert!(v >= 0.0);
        if !(0.0..=1e-3).contains(&y) {
            prop_assert_eq!(v, 0.0);
        }
        // the pulse centre moves at c/n_g
        let centre = p.envelope([0.0, y.clamp(0.0, 1e-3), 0.0], y.clamp(0.0, 1e-3) * 3.24 / C);
        prop_assert!(centre >= v);
    }
}
