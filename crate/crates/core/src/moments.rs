//! Moments of the maximum and walker marginals.
//!
//! Exact values come from one-dimensional (or, for the walker's second
//! moment, two-dimensional) integral representations evaluated by adaptive
//! quadrature. Large-`m` expansions are separate functions. Where two sets
//! of expansion constants are in circulation, both are provided and the
//! `_rederived` one is the one the quadrature supports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::params::NumericConfig;
use crate::quad::Quadrature;
use crate::special::{gamma, ln_gamma, logcosh};
use crate::{OrwError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Quadrature,
    ClosedForm,
    Asymptotic,
}

impl MomentMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentMethod::Quadrature => "quadrature",
            MomentMethod::ClosedForm => "closed_form",
            MomentMethod::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub value: f64,
    pub method: MomentMethod,
    pub t: f64,
    pub m: f64,
    pub k: u32,
    /// Error estimate (quadrature) or zero for closed forms.
    pub tolerance: f64,
}

fn check(t: f64, m: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(OrwError::domain(format!("moments need t > 0, got {t}")));
    }
    if !(m > -0.25 && m.is_finite()) {
        return Err(OrwError::domain(format!("m = delta/4 must exceed -1/4, got {m}")));
    }
    Ok(())
}

fn quad(cfg: &NumericConfig) -> Quadrature {
    Quadrature::new(cfg.quad_tol).with_rel_tol(cfg.quad_tol)
}

/// `E(b^k)` for the maximum at time `t`:
/// `(1+2m) t^(k/2) / (2^(k/2) Gamma(k/2+1)) int_0^inf acosh(1+z)^k (1+z)^(-2-2m) dz`,
/// evaluated after `z = cosh v - 1` as `int v^k sinh v cosh^(-2-2m) v dv`.
pub fn max_moment(k: u32, t: f64, m: f64, cfg: &NumericConfig) -> Result<MomentResult> {
    check(t, m)?;
    let kf = k as f64;
    let p = 2.0 + 2.0 * m;
    let r = quad(cfg).integrate_to_infinity(
        |v| {
            if v == 0.0 {
                return 0.0;
            }
            (kf * v.ln() + v.tanh().ln() + (1.0 - p) * logcosh(v)).exp()
        },
        0.0,
    )?;
    let scale = (1.0 + 2.0 * m) * t.powf(kf / 2.0) / ((kf / 2.0).exp2() * gamma(kf / 2.0 + 1.0));
    Ok(MomentResult {
        value: scale * r.value,
        method: MomentMethod::Quadrature,
        t,
        m,
        k,
        tolerance: scale * r.error,
    })
}

/// Two-term expansion with the coefficient `5k/24`,
/// `E(b^k) ~ (t/(2m+1))^(k/2) (1 + (5k/24)(k/2+1)/(2m+1))`.
pub fn max_moment_asymptotic(k: u32, t: f64, m: f64) -> MomentResult {
    let kf = k as f64;
    let p = 2.0 * m + 1.0;
    MomentResult {
        value: (t / p).powf(kf / 2.0) * (1.0 + 5.0 * kf / 24.0 * (kf / 2.0 + 1.0) / p),
        method: MomentMethod::Asymptotic,
        t,
        m,
        k,
        tolerance: 0.0,
    }
}

/// Two-term expansion with the correction coefficient rederived from the
/// integral: `E(b^k) ~ (t/(2m+1))^(k/2) (1 + k(k+2)/(12(2m+1)))`.
pub fn max_moment_asymptotic_rederived(k: u32, t: f64, m: f64) -> MomentResult {
    let kf = k as f64;
    let p = 2.0 * m + 1.0;
    MomentResult {
        value: (t / p).powf(kf / 2.0) * (1.0 + kf * (kf + 2.0) / (12.0 * p)),
        ..max_moment_asymptotic(k, t, m)
    }
}

/// Relative spread of the maximum from the `5k/24` expansion,
/// `sqrt(5/(24(2m+1)))`.
pub fn max_dispersion(m: f64) -> f64 {
    (5.0 / (24.0 * (2.0 * m + 1.0))).sqrt()
}

/// Relative spread implied by [`max_moment_asymptotic_rederived`],
/// `sqrt(1/(6(2m+1)))`.
pub fn max_dispersion_rederived(m: f64) -> f64 {
    (1.0 / (6.0 * (2.0 * m + 1.0))).sqrt()
}

/// Relative spread `sqrt(Var b)/E(b)` from the quadrature moments.
pub fn max_dispersion_exact(m: f64, cfg: &NumericConfig) -> Result<f64> {
    let e1 = max_moment(1, 1.0, m, cfg)?.value;
    let e2 = max_moment(2, 1.0, m, cfg)?.value;
    Ok((e2 - e1 * e1).sqrt() / e1)
}

/// `E(y)` for the walker, `delta = 4m`.
///
/// Integer `m >= 1`: `2m sqrt(t/2) (Gamma(m)/Gamma(m+1/2) - Gamma(m+1/2)/Gamma(m+1))`.
/// Otherwise the integral
/// `4^(m+1) t m / sqrt(2 pi t) int_0^1 (1-u)^2 u^(2m-1) (1+u^2)^(-(2m+1)) du`,
/// and `sqrt(2t/pi)` at `m = 0`.
pub fn walker_mean(t: f64, m: f64, cfg: &NumericConfig) -> Result<MomentResult> {
    check(t, m)?;
    let out = |value, method, tolerance| MomentResult {
        value,
        method,
        t,
        m,
        k: 1,
        tolerance,
    };
    if m == 0.0 {
        return Ok(out((2.0 * t / std::f64::consts::PI).sqrt(), MomentMethod::ClosedForm, 0.0));
    }
    if m >= 1.0 && m.fract() == 0.0 {
        return Ok(out(walker_mean_closed(t, m), MomentMethod::ClosedForm, 0.0));
    }
    let (v, e) = walker_mean_integral(t, m, cfg)?;
    Ok(out(v, MomentMethod::Quadrature, e))
}

/// Closed form of the walker mean (valid for real `m > 0`).
pub fn walker_mean_closed(t: f64, m: f64) -> f64 {
    let a = (ln_gamma(m) - ln_gamma(m + 0.5)).exp();
    let b = (ln_gamma(m + 0.5) - ln_gamma(m + 1.0)).exp();
    2.0 * m * (t / 2.0).sqrt() * (a - b)
}

/// The mean integral. Below `m = 1/2` it is taken in `v = u^(2m)`, which
/// removes the endpoint singularity (`m u^(2m-1) du = dv/2`).
pub fn walker_mean_integral(t: f64, m: f64, cfg: &NumericConfig) -> Result<(f64, f64)> {
    check(t, m)?;
    if m <= 0.0 {
        return Err(OrwError::domain("the mean integral needs m > 0"));
    }
    let r = if m >= 0.5 {
        quad(cfg).integrate(
            |u: f64| {
                m * (1.0 - u).powi(2) * u.powf(2.0 * m - 1.0) * (-(2.0 * m + 1.0) * (u * u).ln_1p()).exp()
            },
            0.0,
            1.0,
        )?
    } else {
        quad(cfg).integrate(
            |v: f64| {
                let u = v.powf(0.5 / m);
                0.5 * (1.0 - u).powi(2) * (-(2.0 * m + 1.0) * (u * u).ln_1p()).exp()
            },
            0.0,
            1.0,
        )?
    };
    let scale = (2.0 * (m + 1.0)).exp2() * t / (2.0 * std::f64::consts::PI * t).sqrt();
    Ok((scale * r.value, scale * r.error))
}

/// `E(y^2)` for the walker:
/// `2m 2^(2m+1) t int_0^1 int_0^1 (1+x^2 z^2)^(-(2m+1)) (1-x)(1-z) x^(2m-1) z^(2m) dx dz`,
/// and `t` at `m = 0`.
pub fn walker_second_moment(t: f64, m: f64, cfg: &NumericConfig) -> Result<MomentResult> {
    check(t, m)?;
    if m == 0.0 {
        return Ok(MomentResult {
            value: t,
            method: MomentMethod::ClosedForm,
            t,
            m,
            k: 2,
            tolerance: 0.0,
        });
    }
    let (v, e) = second_moment_integral(m, cfg)?;
    let scale = (2.0 * m + 1.0).exp2() * t;
    Ok(MomentResult {
        value: scale * v,
        method: MomentMethod::Quadrature,
        t,
        m,
        k: 2,
        tolerance: scale * e,
    })
}

/// `2m int int (...) x^(2m-1) ... dx dz`; `v = x^(2m)` below `m = 1/2`.
fn second_moment_integral(m: f64, cfg: &NumericConfig) -> Result<(f64, f64)> {
    if m <= 0.0 {
        return Err(OrwError::domain("the second-moment integral needs m > 0"));
    }
    let q = quad(cfg);
    let inner_q = Quadrature::new(cfg.quad_tol * 0.1).with_rel_tol(cfg.quad_tol * 0.1);
    let mut failure = None;
    let outer = q.integrate(
        |z: f64| {
            if z == 0.0 {
                return 0.0;
            }
            let zf = (1.0 - z) * z.powf(2.0 * m);
            let kernel = |x: f64| (1.0 - x) * (-(2.0 * m + 1.0) * (x * x * z * z).ln_1p()).exp();
            let inner = if m >= 0.5 {
                inner_q.integrate(|x: f64| 2.0 * m * x.powf(2.0 * m - 1.0) * kernel(x), 0.0, 1.0)
            } else {
                inner_q.integrate(|v: f64| kernel(v.powf(0.5 / m)), 0.0, 1.0)
            };
            match inner {
                Ok(r) => zf * r.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = outer?;
    Ok((r.value, r.error))
}

/// The second moment with prefactor `(2m+1)` in place of `2m`, i.e.
/// `(2m+1)/(2m)` times [`walker_second_moment`]. At `m = 1` it gives `3(1-G)`.
pub fn walker_second_moment_alt_prefactor(t: f64, m: f64, cfg: &NumericConfig) -> Result<f64> {
    let v = walker_second_moment(t, m, cfg)?;
    Ok(v.value * (2.0 * m + 1.0) / (2.0 * m))
}

/// Large-`m` asymptote `E(y^2) ~ t / (3(2m+1))`.
pub fn walker_second_moment_asymptotic(t: f64, m: f64) -> MomentResult {
    MomentResult {
        value: t / (3.0 * (2.0 * m + 1.0)),
        method: MomentMethod::Asymptotic,
        t,
        m,
        k: 2,
        tolerance: 0.0,
    }
}

/// Independent route to `E(y^k)` straight from the Laplace-domain joint
/// density: `(2+delta) 2^(-(k+2)/2) t^(k/2) C_k / Gamma(k/2+1)` with
/// `C_k = int_0^inf cosh(v)^(-(2+2m)) int_0^v u^k cosh u du dv`, `k` in 0..=2.
pub fn walker_moment_laplace(k: u32, t: f64, m: f64, cfg: &NumericConfig) -> Result<MomentResult> {
    check(t, m)?;
    let p = 2.0 + 2.0 * m;
    // Inner integral divided by cosh v.
    let inner = move |v: f64| -> f64 {
        let (th, sech) = (v.tanh(), 1.0 / v.cosh());
        match k {
            0 => th,
            1 => v * th - 1.0 + sech,
            _ => v * v * th - 2.0 * v + 2.0 * th,
        }
    };
    if k > 2 {
        return Err(OrwError::domain("walker_moment_laplace supports k <= 2"));
    }
    let r = quad(cfg).integrate_to_infinity(
        |v| {
            if v == 0.0 {
                return 0.0;
            }
            // The closed inner forms cancel for small v; sum the series there.
            let g = if v < 1.0 {
                let kf = k as f64;
                let (mut term, mut sum) = (v.powf(kf + 1.0), 0.0);
                for n in 0..20 {
                    let j = 2.0 * n as f64;
                    sum += term / (kf + j + 1.0);
                    term *= v * v / ((j + 1.0) * (j + 2.0));
                }
                sum / v.cosh()
            } else {
                inner(v)
            };
            g * ((1.0 - p) * logcosh(v)).exp()
        },
        0.0,
    )?;
    let kf = k as f64;
    let scale = (2.0 + 4.0 * m) * (-(kf + 2.0) / 2.0).exp2() * t.powf(kf / 2.0) / gamma(kf / 2.0 + 1.0);
    Ok(MomentResult {
        value: scale * r.value,
        method: MomentMethod::Quadrature,
        t,
        m,
        k,
        tolerance: scale * r.error,
    })
}

/// Relative spread of the walker from the asymptotes `E(y)^2 ~ t/(16(2m+1))`
/// and `E(y^2) ~ t/(3(2m+1))`: `sqrt(13/3)`.
pub fn walker_dispersion(_m: f64) -> f64 {
    (13.0f64 / 3.0).sqrt()
}

/// Large-`m` limit of the walker's relative spread from the corrected
/// moments: `E(y) ~ (1/2) sqrt(t/2m)` and `E(y^2) ~ t/(3(2m+1))` give
/// `1/sqrt(3)`.
pub fn walker_dispersion_rederived(_m: f64) -> f64 {
    1.0 / 3f64.sqrt()
}

/// Relative spread from the exact walker moments at `t = 1`.
pub fn walker_dispersion_exact(m: f64, cfg: &NumericConfig) -> Result<f64> {
    let e1 = walker_mean(1.0, m, cfg)?.value;
    let e2 = walker_second_moment(1.0, m, cfg)?.value;
    Ok((e2 - e1 * e1).sqrt() / e1)
}

/// A labelled moment for export.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub quantity: String,
    pub result: MomentResult,
}

/// Writes `quantity,k,m,t,method,value,tolerance`.
pub fn write_moments_csv<W: Write>(rows: &[MomentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "k", "m", "t", "method", "value", "tolerance"])?;
    for r in rows {
        let m = &r.result;
        w.write_record([
            r.quantity.clone(),
            m.k.to_string(),
            crate::fmt_f64(m.m),
            crate::fmt_f64(m.t),
            m.method.as_str().to_string(),
            crate::fmt_f64(m.value),
            crate::fmt_f64(m.tolerance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::CATALAN;
    use std::f64::consts::PI;

    #[test]
    fn normalization_and_unreinforced_mean() {
        let cfg = NumericConfig::default();
        for m in [0.0, 0.3, 2.0] {
            assert!((max_moment(0, 1.7, m, &cfg).unwrap().value - 1.0).abs() < 1e-10);
        }
        let e = max_moment(1, 1.0, 0.0, &cfg).unwrap().value;
        assert!((e - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn walker_mean_small_m() {
        let cfg = NumericConfig::default();
        let e1 = walker_mean(1.0, 1.0, &cfg).unwrap().value;
        assert!((e1 - (4.0 - PI) / (2.0 * PI).sqrt()).abs() < 1e-14);
        let e2 = walker_mean(1.0, 2.0, &cfg).unwrap().value;
        assert!((e2 - 2.0 * (4.0 / 3.0 - 3.0 * PI / 8.0) * (2.0 / PI).sqrt()).abs() < 1e-14);
        let e0 = walker_mean(1.0, 0.0, &cfg).unwrap().value;
        assert!((e0 - (2.0 / PI).sqrt()).abs() < 1e-15);
        // The integral tends to the m = 0 value.
        let (near, _) = walker_mean_integral(1.0, 1e-6, &cfg).unwrap();
        assert!((near - e0).abs() < 1e-5);
    }

    #[test]
    fn closed_form_matches_integral() {
        let cfg = NumericConfig::default();
        for m in 1..=6 {
            let c = walker_mean_closed(2.0, m as f64);
            let (q, _) = walker_mean_integral(2.0, m as f64, &cfg).unwrap();
            assert!((c - q).abs() < 1e-10, "m {m}: {c} vs {q}");
        }
    }

    #[test]
    fn second_moment_m1_is_catalan() {
        let cfg = NumericConfig::default();
        let v = walker_second_moment(1.0, 1.0, &cfg).unwrap().value;
        assert!((v - 2.0 * (1.0 - CATALAN)).abs() < 1e-9, "{v}");
        let lap = walker_moment_laplace(2, 1.0, 1.0, &cfg).unwrap().value;
        assert!((v - lap).abs() < 1e-9, "{v} {lap}");
    }

    #[test]
    fn scaling_laws() {
        let cfg = NumericConfig::default();
        let c: f64 = 1.37;
        for m in [0.5, 2.0] {
            let a = max_moment(1, 1.0, m, &cfg).unwrap().value;
            let b = max_moment(1, c * c, m, &cfg).unwrap().value;
            assert!((b / a - c).abs() < 1e-12);
            let a = walker_second_moment(1.0, m, &cfg).unwrap().value;
            let b = walker_second_moment(c * c, m, &cfg).unwrap().value;
            assert!((b / a - c * c).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = vec![MomentRow {
            quantity: "walker_mean".into(),
            result: walker_mean(1.0, 0.0, &NumericConfig::default()).unwrap(),
        }];
        let mut buf = Vec::new();
        write_moments_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("quantity,k,m,t,method,value,tolerance\nwalker_mean,1,0.0000000000000000e0,"));
    }
}
