use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::ilt::ilt_log;
use super::laplace::LaplaceField;
use super::{Method, SeriesValue};
use crate::params::{gamma_of, make_param, NumericConfig};
use crate::special::factorial;
use crate::{OrwError, Result};

/// Density `Q(t, b)` of the maximum from the series in
/// `exp(-(pi gamma / 4)(2j + 1 + delta/2)^2)`. Fast for large `gamma`.
pub fn q_series(t: f64, b: f64, delta: f64, cfg: &NumericConfig) -> Result<SeriesValue> {
    let g = gamma_of(t, b)?.gamma;
    let p = make_param(delta)?;
    let n = p.n;
    let pref = (1.0 + n).exp2() * g.sqrt() / b;
    let mut sum = 0.0;
    // ln C(j + n, j)
    let mut ln_c = 0.0;
    let log_term = |j: usize, ln_c: f64| {
        let w = 2.0 * j as f64 + 1.0 + n;
        ln_c + w.ln() - 0.25 * PI * g * w * w
    };
    let mut cur = log_term(0, ln_c);
    for j in 0..cfg.max_terms {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * cur.exp();
        ln_c += ((n + (j + 1) as f64) / (j + 1) as f64).ln();
        let next = log_term(j + 1, ln_c);
        let tail = pref * next.exp();
        if next < cur && tail <= cfg.series_tol {
            return Ok(SeriesValue {
                value: pref * sum,
                terms_used: j + 1,
                tail_bound: tail,
                method: Method::DirectSeries,
                gamma: Some(g),
            });
        }
        cur = next;
    }
    Err(OrwError::Convergence {
        what: "direct series for Q",
        terms: cfg.max_terms,
        estimate: pref * cur.exp(),
    })
}

/// One term `coeff * beta^beta_power * gamma^gamma_power * exp(-beta/gamma)`
/// of the dual representation, summed as
/// `sum_{j in Z} (-1)^j (2j+1) (...)` with `beta = pi (2j+1)^2 / 4`.
/// The overall `b Q` is the sum of all such terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonTerm {
    pub coeff: f64,
    pub beta_power: u32,
    pub gamma_power: f64,
}

/// Coefficients of the dual representation of `b Q` for `delta = 4m`.
///
/// `C(j+m, 2m)(2j+1)` is a polynomial in odd powers `w^(2p+1)`, `w = 2j+1`.
/// Each power is a derivative of `A(gamma) = sum (-1)^j w exp(-pi gamma w^2/4)`,
/// whose theta dual is `gamma^(-3/2) sum (-1)^j w exp(-pi w^2 / (4 gamma))`;
/// the derivatives are taken term by term.
pub fn poisson_terms(m: u32) -> Vec<PoissonTerm> {
    // Coefficients of prod_{k=1..m} (X - (2k-1)^2) in X = w^2.
    let mut poly = vec![1.0];
    for k in 1..=m {
        let r = ((2 * k - 1) * (2 * k - 1)) as f64;
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        poly = next;
    }
    let norm = 4f64.powi(m as i32) * factorial(2 * m);
    // d^p/dgamma^p of beta^k gamma^(-3/2-i) e^(-beta/gamma), keyed by (i, k).
    let mut deriv: BTreeMap<(u32, u32), f64> = BTreeMap::from([((0, 0), 1.0)]);
    let mut combined: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (p, e) in poly.iter().enumerate() {
        let c_p = e / norm * (-4.0 / PI).powi(p as i32);
        for (&key, d) in &deriv {
            *combined.entry(key).or_default() += c_p * d;
        }
        let mut next: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (&(i, k), d) in &deriv {
            *next.entry((i + 1, k)).or_default() -= (1.5 + i as f64) * d;
            *next.entry((i + 2, k + 1)).or_default() += d;
        }
        deriv = next;
    }
    let outer = 4f64.powi(m as i32) * if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    combined
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((i, k), c)| PoissonTerm {
            coeff: outer * c,
            beta_power: k,
            // sqrt(gamma) * gamma^(-3/2 - i)
            gamma_power: -1.0 - i as f64,
        })
        .collect()
}

/// `Q(t, b)` from the dual series, fast for small `gamma`; needs integer
/// `m = delta/4`.
pub fn q_poisson(t: f64, b: f64, m: u32, cfg: &NumericConfig) -> Result<SeriesValue> {
    let g = gamma_of(t, b)?.gamma;
    let terms = poisson_terms(m);
    let ln_g = g.ln();
    let eval_j = |j: usize| {
        let w = 2.0 * j as f64 + 1.0;
        let beta = 0.25 * PI * w * w;
        let ln_beta = beta.ln();
        let mut v = 0.0;
        let mut mag = 0.0;
        for term in &terms {
            let x = term.coeff
                * (term.beta_power as f64 * ln_beta + term.gamma_power * ln_g - beta / g).exp();
            v += x;
            mag += x.abs();
        }
        // Pair j with -1-j: same value, so the sum over Z doubles.
        (2.0 * w * v, 2.0 * w * mag)
    };
    let mut sum = 0.0;
    let (mut cur, mut cur_mag) = eval_j(0);
    for j in 0..cfg.max_terms {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * cur;
        let (next, next_mag) = eval_j(j + 1);
        if next_mag < cur_mag && next_mag / b <= cfg.series_tol {
            let ratio = next_mag / cur_mag;
            return Ok(SeriesValue {
                value: sum / b,
                terms_used: j + 1,
                tail_bound: next_mag / b / (1.0 - ratio).max(0.5),
                method: Method::PoissonSeries,
                gamma: Some(g),
            });
        }
        cur = next;
        cur_mag = next_mag;
    }
    Err(OrwError::Convergence {
        what: "dual series for Q",
        terms: cfg.max_terms,
        estimate: cur_mag / b,
    })
}

/// `Q(t, b)` by numerical inversion of its Laplace transform.
pub fn q_ilt(t: f64, b: f64, delta: f64, cfg: &NumericConfig) -> Result<SeriesValue> {
    let g = gamma_of(t, b)?.gamma;
    make_param(delta)?;
    let field = LaplaceField::maximum(b, delta)?;
    let v = ilt_log(|s| field.log_eval(s), t, cfg)?;
    Ok(SeriesValue {
        value: v.value,
        terms_used: v.nodes,
        tail_bound: v.change,
        method: Method::IltOracle,
        gamma: Some(g),
    })
}

/// `Q(t, b)` through whichever representation suits `gamma`: the direct
/// series when `gamma (1 + delta/2)^2 >= 1`, otherwise the dual series for
/// integer `m`, otherwise numerical inversion.
pub fn q_auto(t: f64, b: f64, delta: f64, cfg: &NumericConfig) -> Result<SeriesValue> {
    let g = gamma_of(t, b)?.gamma;
    let p = make_param(delta)?;
    if g * (1.0 + p.n).powi(2) >= 1.0 {
        if let Ok(v) = q_series(t, b, delta, cfg) {
            return Ok(v);
        }
    } else if let Ok(m) = p.m_int() {
        if let Ok(v) = q_poisson(t, b, m, cfg) {
            return Ok(v);
        }
    }
    q_ilt(t, b, delta, cfg)
}
