use std::f64::consts::PI;

use super::joint::walker_marginal_from_joint;
use super::{Method, SeriesValue};
use crate::params::NumericConfig;
use crate::special::ln_gamma;
use crate::{OrwError, Result};

/// `P_m(t, 0) = sqrt(2/(pi t)) 4^m (m!)^2 / (2m)!`.
pub fn walker_density_at_origin(t: f64, m: u32) -> f64 {
    let m = m as f64;
    let ln = 2.0 * m * std::f64::consts::LN_2 + 2.0 * ln_gamma(m + 1.0) - ln_gamma(2.0 * m + 1.0);
    (2.0 / (PI * t)).sqrt() * ln.exp()
}

/// Direct sum of the alternating series for `P_m(t, y)` in
/// `exp(-(y^2/2t)(2j + 3 + 2m)^2)`, `y > 0`.
///
/// Returns the value with the tail bound and an estimate of the rounding
/// error from cancellation.
fn p_direct(t: f64, y: f64, m: u32, cfg: &NumericConfig) -> Option<(SeriesValue, f64)> {
    let mf = m as f64;
    let c = y * y / (2.0 * t);
    let pref = (2.0 + 4.0 * mf) * (1.0 + 2.0 * mf).exp2() / (2.0 * PI * t).sqrt();
    let lead = (-c * (1.0 + 2.0 * mf).powi(2)).exp() / (2.0 + 2.0 * mf);
    if m == 0 {
        return Some((
            SeriesValue {
                value: pref * lead,
                terms_used: 1,
                tail_bound: 0.0,
                method: Method::DirectSeries,
                gamma: None,
            },
            0.0,
        ));
    }
    let factor = 2.0 * mf / (1.0 + 2.0 * mf);
    // ln C(j + 1 + 2m, 2m), starting at j = 0 with value 2m + 1.
    let mut ln_binom = (2.0 * mf + 1.0).ln();
    let ln_term = |j: usize, ln_binom: f64| {
        let w = 2.0 * j as f64 + 3.0 + 2.0 * mf;
        (factor * w / (w * w - 1.0)).ln() + ln_binom - c * w * w
    };
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut cur = ln_term(0, ln_binom);
    for j in 0..cfg.max_terms {
        let v = cur.exp();
        sum += if j % 2 == 0 { v } else { -v };
        abs_sum += v;
        ln_binom += ((j + 2) as f64 + 2.0 * mf).ln() - ((j + 2) as f64).ln();
        let next = ln_term(j + 1, ln_binom);
        let tail = pref * next.exp();
        if next < cur && tail <= cfg.series_tol {
            let roundoff = 4.0 * f64::EPSILON * pref * (abs_sum + lead);
            return Some((
                SeriesValue {
                    value: pref * (lead - sum),
                    terms_used: j + 2,
                    tail_bound: tail,
                    method: Method::DirectSeries,
                    gamma: None,
                },
                roundoff,
            ));
        }
        cur = next;
    }
    None
}

/// Walker density `P_m(t, y)` for `delta = 4m`.
///
/// The alternating series is summed directly when its tail and rounding
/// error are both within `series_tol` (always the case when
/// `y^2/t > log(2(m+1)) / (4(m+1))`); otherwise the density is obtained by
/// integrating the inverted joint density over the maximum.
pub fn p_series(t: f64, y: f64, m: u32, cfg: &NumericConfig) -> Result<SeriesValue> {
    if !(t > 0.0) || !(y >= 0.0) || !y.is_finite() {
        return Err(OrwError::domain(format!("P_m(t, y) needs t > 0 and y >= 0, got t = {t}, y = {y}")));
    }
    if y == 0.0 {
        return Ok(SeriesValue {
            value: walker_density_at_origin(t, m),
            terms_used: 0,
            tail_bound: 0.0,
            method: Method::ClosedForm,
            gamma: None,
        });
    }
    if let Some((v, roundoff)) = p_direct(t, y, m, cfg) {
        if roundoff <= cfg.series_tol {
            return Ok(SeriesValue {
                tail_bound: v.tail_bound + roundoff,
                ..v
            });
        }
    }
    walker_marginal_from_joint(t, y, 4.0 * m as f64, cfg)
}

/// True when `y^2 / t > log(2(m+1)) / (4(m+1))`, where the series terms
/// decrease from the first one.
pub fn in_monotone_region(t: f64, y: f64, m: u32) -> bool {
    let m1 = m as f64 + 1.0;
    y * y / t > (2.0 * m1).ln() / (4.0 * m1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_gaussian_when_unreinforced() {
        let cfg = NumericConfig::default();
        for (t, y) in [(1.0, 0.3), (2.5, 1.7)] {
            let v = p_series(t, y, 0, &cfg).unwrap().value;
            let expect = (2.0 / (PI * t)).sqrt() * (-y * y / (2.0 * t)).exp();
            assert!((v - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn origin_value() {
        let v = walker_density_at_origin(1.0, 1);
        assert!((v - (2.0 / PI).sqrt() * 2.0).abs() < 1e-14);
        assert_eq!(p_series(1.0, 0.0, 1, &NumericConfig::default()).unwrap().method, Method::ClosedForm);
    }

    #[test]
    fn region_test() {
        assert!(in_monotone_region(1.0, 1.0, 1));
        assert!(!in_monotone_region(1.0, 0.1, 1));
    }
}
