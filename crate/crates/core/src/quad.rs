//! Adaptive Gauss-Kronrod (10/21 point) quadrature with global interval
//! bisection, plus a map for half-infinite ranges.

// Nodes and weights are the published QUADPACK values.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{OrwError, Result};

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_643_474_262,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

/// Tolerances of the adaptive rule. The iteration stops once the summed
/// error estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Quadrature {
    pub fn new(abs_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol: 0.0,
            max_intervals: 2_000,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<QuadResult> {
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                evals: 0,
            });
        }
        let first = Segment::eval(&mut f, a, b);
        let mut value = first.value;
        let mut error = first.error;
        let mut evals = 21;
        let mut heap = BinaryHeap::new();
        heap.push(first);
        while error > self.abs_tol.max(self.rel_tol * value.abs()) {
            if heap.len() >= self.max_intervals {
                return Err(OrwError::Convergence {
                    what: "adaptive quadrature",
                    terms: evals,
                    estimate: error,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval cannot be split further in double precision.
                heap.push(worst);
                break;
            }
            let left = Segment::eval(&mut f, worst.a, mid);
            let right = Segment::eval(&mut f, mid, worst.b);
            evals += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // Re-sum to shed the drift of the running updates.
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(QuadResult {
            value,
            error,
            evals,
        })
    }

    /// Integrates `f` over `[a, inf)` through `x = a + u / (1 - u)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<QuadResult> {
        self.integrate(
            |u| {
                let w = 1.0 - u;
                let x = a + u / w;
                let fx = f(x);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (w * w)
                }
            },
            0.0,
            1.0,
        )
    }

    /// Integrates over `[a, b]` split at the given interior points.
    pub fn integrate_pieces<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Result<QuadResult> {
        let mut total = QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        };
        let pieces = (points.len().max(1) - 1).max(1) as f64;
        let piece = Quadrature {
            abs_tol: self.abs_tol / pieces,
            ..*self
        };
        for w in points.windows(2) {
            let r = piece.integrate(&mut f, w[0], w[1])?;
            total.value += r.value;
            total.error += r.error;
            total.evals += r.evals;
        }
        Ok(total)
    }
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

impl Segment {
    fn eval<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = f(center);
        let mut kronrod = WGK[10] * fc;
        let mut gauss = 0.0;
        let mut abs = kronrod.abs();
        let mut fv = [(0.0, 0.0); 10];
        for (j, xk) in XGK.iter().take(10).enumerate() {
            let dx = half * xk;
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            fv[j] = (f1, f2);
            kronrod += WGK[j] * (f1 + f2);
            abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kronrod;
        let mut asc = WGK[10] * (fc - mean).abs();
        for (j, (f1, f2)) in fv.iter().enumerate() {
            asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let value = kronrod * half;
        let abs = abs * half.abs();
        let asc = asc * half.abs();
        let mut error = ((kronrod - gauss) * half).abs();
        if asc != 0.0 && error != 0.0 {
            error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
        }
        if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            error = error.max(50.0 * f64::EPSILON * abs);
        }
        if !value.is_finite() {
            error = f64::INFINITY;
        }
        Segment { a, b, value, error }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_consistent() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_is_exact_for_high_degree() {
        // Kronrod 21 integrates degree <= 31 exactly, Gauss 10 degree <= 19.
        for deg in [0, 5, 19, 30] {
            let mut f = |x: f64| x.powi(deg);
            let s = Segment::eval(&mut f, 0.0, 1.0);
            assert!((s.value - 1.0 / (deg as f64 + 1.0)).abs() < 1e-15, "deg {deg}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = Quadrature::new(1e-12);
        let r = q.integrate(|x: f64| x.sqrt().ln(), 0.0, 1.0).unwrap();
        assert!((r.value + 0.5).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn half_infinite_gaussian() {
        let q = Quadrature::new(1e-13);
        let r = q.integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }
}
