//! Small special-function helpers: generalized binomials, Gamma wrappers and
//! overflow-safe hyperbolic logarithms for real and complex arguments.

use std::f64::consts::LN_2;

use num_complex::Complex64;

/// Catalan's constant.
pub const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `C(j + n, j)` for real `n`, as the product `prod_{i=1..j} (n + i) / i`.
pub fn binom_shifted(n: f64, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 1..=j {
        c *= (n + i as f64) / i as f64;
    }
    c
}

/// Running values of `C(j + n, j)` for `j = 0, 1, ...`.
#[derive(Debug, Clone)]
pub struct ShiftedBinomials {
    n: f64,
    j: usize,
    value: f64,
}

impl ShiftedBinomials {
    pub fn new(n: f64) -> Self {
        ShiftedBinomials { n, j: 0, value: 1.0 }
    }
}

impl Iterator for ShiftedBinomials {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.value;
        self.j += 1;
        self.value *= (self.n + self.j as f64) / self.j as f64;
        Some(out)
    }
}

/// Integer binomial coefficient as a float.
pub fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `log(cosh(x))` without overflow.
pub fn logcosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `log(cosh(z))` on the principal branch for `Re z >= 0`.
pub fn logcosh_c(z: Complex64) -> Complex64 {
    let z = if z.re < 0.0 { -z } else { z };
    z + (Complex64::new(1.0, 0.0) + (-2.0 * z).exp()).ln() - LN_2
}

/// `log(sinh(z))` for `Re z > 0`.
pub fn logsinh_c(z: Complex64) -> Complex64 {
    z + (Complex64::new(1.0, 0.0) - (-2.0 * z).exp()).ln() - LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_integer_factorial_identity() {
        // (m - 1/2)! = (2m)! sqrt(pi) / (4^m m!)
        for m in 0..12u32 {
            let lhs = gamma(m as f64 + 0.5);
            let rhs = factorial(2 * m) * PI.sqrt() / (4f64.powi(m as i32) * factorial(m));
            assert!((lhs / rhs - 1.0).abs() < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn shifted_binomial_matches_integer_case() {
        for n in 0..6u64 {
            for j in 0..10u64 {
                let (x, y) = (binom_shifted(n as f64, j as usize), binom(n + j, j));
                assert!((x / y - 1.0).abs() < 1e-14);
            }
        }
        let it: Vec<f64> = ShiftedBinomials::new(0.5).take(4).collect();
        assert_eq!(it, vec![1.0, 1.5, 1.875, 2.1875]);
    }

    #[test]
    fn logcosh_is_stable() {
        assert!((logcosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((logcosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        let z = Complex64::new(0.7, 0.4);
        assert!((logcosh_c(z) - z.cosh().ln()).norm() < 1e-14);
        assert!((logsinh_c(z) - z.sinh().ln()).norm() < 1e-14);
    }
}
