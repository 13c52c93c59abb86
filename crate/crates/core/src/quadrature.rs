//! Deterministic 1D quadrature: Gauss–Legendre rules and a globally adaptive
//! Gauss–Kronrod (10/21) integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes_weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Composite rule over `panels` equal sub-intervals of [a, b].
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[allow(clippy::excessive_precision)] // published digits
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)] // published digits
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)] // published digits
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod evaluation; returns (estimate, error estimate).
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let x = half * XGK[j];
        let s = f(center - x) + f(center + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let est = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (est, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 20_000,
        }
    }
}

impl Adaptive {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates over [a, b] starting from `initial_panels` equal pieces.
    /// Seeding with enough panels to resolve known oscillations avoids
    /// spurious early convergence.
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        initial_panels: usize,
        f: F,
    ) -> QuadResult {
        let n = initial_panels.max(1);
        let h = (b - a) / n as f64;
        let breaks: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        self.integrate_breaks(&breaks, f)
    }

    /// Integrates over consecutive intervals given by `breaks` (ascending).
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> QuadResult {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut evals = 0;
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let (v, e) = gk21(&mut f, w[0], w[1]);
            evals += 21;
            total += v;
            total_err += e;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value: v,
                error: e,
            });
        }
        let mut splits = 0;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                return QuadResult {
                    value: total,
                    error: total_err,
                    evaluations: evals,
                    converged: true,
                };
            }
            if splits >= self.max_subdivisions {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted in floating point
                heap.push(Segment {
                    error: 0.0,
                    ..worst
                });
                total_err -= worst.error;
                splits += 1;
                continue;
            }
            let (v1, e1) = gk21(&mut f, worst.a, mid);
            let (v2, e2) = gk21(&mut f, mid, worst.b);
            evals += 42;
            splits += 1;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Segment {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });
        }
        // recompute the sums to shed accumulated rounding
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        QuadResult {
            value,
            error,
            evaluations: evals,
            converged: error <= self.abs_tol.max(self.rel_tol * value.abs()),
        }
    }
}
