use std::f64::consts::PI;

use num_complex::Complex64;

use crate::params::NumericConfig;
use crate::{OrwError, Result};

/// Fixed Talbot inversion with `m` nodes of a transform given through its
/// logarithm, so that `exp(t s) F(s)` is formed without overflow.
pub fn talbot_log<F: Fn(Complex64) -> Complex64>(log_f: &F, t: f64, m: usize) -> f64 {
    talbot_with_roundoff(log_f, t, m).0
}

/// Talbot sum together with an a-priori bound on its rounding error:
/// each node contributes `|term| eps (m + |exponent|)` for the summation and
/// for the exponential of a large argument.
fn talbot_with_roundoff<F: Fn(Complex64) -> Complex64>(log_f: &F, t: f64, m: usize) -> (f64, f64) {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mf = m as f64;
    let arg0 = r * t + log_f(Complex64::new(r, 0.0)).re;
    let first = 0.5 * arg0.exp();
    let mut acc = first;
    let mut noise = first.abs() * (mf + arg0.abs());
    for k in 1..m {
        let th = k as f64 * PI / mf;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        let arg = t * s + log_f(s);
        let term = (arg.exp() * Complex64::new(1.0, sigma)).re;
        acc += term;
        noise += arg.re.exp() * (1.0 + sigma.abs()) * (mf + arg.norm());
    }
    (r / mf * acc, r / mf * noise * f64::EPSILON)
}

/// Inverts a transform given by its logarithm at `t`, checking the result
/// against a contour with three quarters of the nodes. (Half the default 32
/// nodes is not yet converged for slowly decaying transforms.) The allowed
/// change is `10 quad_tol max(1, |value|)` plus the rounding bounds of both
/// sums, which dominate for transforms close to a constant.
pub fn ilt_log<F: Fn(Complex64) -> Complex64>(log_f: F, t: f64, cfg: &NumericConfig) -> Result<IltValue> {
    if !(t > 0.0) {
        return Err(OrwError::domain(format!("inverse Laplace transform needs t > 0, got {t}")));
    }
    let m = cfg.ilt_terms.max(4);
    let (full, noise_full) = talbot_with_roundoff(&log_f, t, m);
    let (coarse, noise_coarse) = talbot_with_roundoff(&log_f, t, 3 * m / 4);
    let change = (full - coarse).abs();
    let allowed = 10.0 * cfg.quad_tol * full.abs().max(1.0) + noise_full + noise_coarse;
    if !full.is_finite() || change > allowed {
        return Err(OrwError::Convergence {
            what: "inverse Laplace transform",
            terms: m,
            estimate: change,
        });
    }
    Ok(IltValue {
        value: full,
        nodes: m,
        change,
        roundoff: noise_full,
    })
}

/// Inverts `F` at `t`, with `F` evaluated directly.
pub fn ilt<F: Fn(Complex64) -> Complex64>(f: F, t: f64, cfg: &NumericConfig) -> Result<IltValue> {
    ilt_log(|s| f(s).ln(), t, cfg)
}

/// Result of an inversion with the size of the `m` versus `3m/4` change
/// and the rounding bound of the `m`-node sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IltValue {
    pub value: f64,
    pub nodes: usize,
    pub change: f64,
    pub roundoff: f64,
}
