use super::ilt::ilt_log;
use super::laplace::LaplaceField;
use super::{Method, SeriesValue};
use crate::params::{make_param, NumericConfig};
use crate::quad::Quadrature;
use crate::{OrwError, Result};

/// Joint density `P(t, y, b)` by numerical inversion; zero for `y > b`.
pub fn joint_density(t: f64, y: f64, b: f64, delta: f64, cfg: &NumericConfig) -> Result<f64> {
    make_param(delta)?;
    let field = LaplaceField::joint(y, b, delta)?;
    if field.is_zero() {
        return Ok(0.0);
    }
    Ok(ilt_log(|s| field.log_eval(s), t, cfg)?.value)
}

fn quad(cfg: &NumericConfig) -> Quadrature {
    Quadrature::new(cfg.quad_tol).with_max_intervals(500)
}

/// `Q(t, b) = int_0^b P(t, y, b) dy` by quadrature of inverted values.
pub fn max_marginal_from_joint(t: f64, b: f64, delta: f64, cfg: &NumericConfig) -> Result<SeriesValue> {
    let mut err = None;
    let r = quad(cfg).integrate(
        |y| {
            joint_density(t, y.min(b), b, delta, cfg).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        },
        0.0,
        b,
    );
    finish(r, err)
}

/// `P(t, y) = int_y^inf P(t, y, b) db` by quadrature of inverted values.
pub fn walker_marginal_from_joint(t: f64, y: f64, delta: f64, cfg: &NumericConfig) -> Result<SeriesValue> {
    if y < 0.0 {
        return Err(OrwError::domain(format!("position must be >= 0, got {y}")));
    }
    let mut err = None;
    let r = quad(cfg).integrate_to_infinity(
        |b| {
            if b <= 0.0 {
                // y = 0 starts the range at b = 0, where the density vanishes.
                return 0.0;
            }
            joint_density(t, y, b, delta, cfg).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        },
        y,
    );
    finish(r, err)
}

fn finish(r: Result<crate::quad::QuadResult>, err: Option<OrwError>) -> Result<SeriesValue> {
    if let Some(e) = err {
        return Err(e);
    }
    let r = r?;
    Ok(SeriesValue {
        value: r.value,
        terms_used: r.evals,
        tail_bound: r.error,
        method: Method::IltOracle,
        gamma: None,
    })
}
