//! Parameter and configuration types shared by every module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{OrwError, Result};

/// Absolute tolerance used to decide whether `m = delta/4` or `n = delta/2`
/// is an integer.
pub const INTEGER_TOL: f64 = 1e-12;

/// Reinforcement strength `delta` (edge weight `1 + delta` once traversed)
/// together with the aliases `m = delta/4` and `n = delta/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReinforcementParam {
    pub delta: f64,
    pub m: f64,
    pub n: f64,
    pub is_integer_n: bool,
    pub is_integer_m: bool,
}

fn nonneg_integer(v: f64) -> bool {
    v > -INTEGER_TOL && (v - v.round()).abs() < INTEGER_TOL
}

pub fn make_param(delta: f64) -> Result<ReinforcementParam> {
    if !delta.is_finite() || delta <= -1.0 {
        return Err(OrwError::domain(format!(
            "reinforcement strength must satisfy delta > -1, got {delta}"
        )));
    }
    let m = delta / 4.0;
    let n = delta / 2.0;
    Ok(ReinforcementParam {
        delta,
        m,
        n,
        is_integer_n: nonneg_integer(n),
        is_integer_m: nonneg_integer(m),
    })
}

impl ReinforcementParam {
    /// Continuum parameter for a given `m` (`delta = 4m`).
    pub fn from_m(m: f64) -> Result<Self> {
        make_param(4.0 * m)
    }

    /// `m` as an integer, or a domain error when `delta/4` is not one.
    pub fn m_int(&self) -> Result<u32> {
        if self.is_integer_m {
            Ok(self.m.round() as u32)
        } else {
            Err(OrwError::domain(format!(
                "m = delta/4 = {} is not a non-negative integer",
                self.m
            )))
        }
    }

    pub fn n_int(&self) -> Result<u32> {
        if self.is_integer_n {
            Ok(self.n.round() as u32)
        } else {
            Err(OrwError::domain(format!(
                "n = delta/2 = {} is not a non-negative integer",
                self.n
            )))
        }
    }

    /// Probability of stepping onto a fresh edge from the running maximum.
    pub fn p_up_at_max(&self) -> f64 {
        1.0 / (2.0 + self.delta)
    }

    /// Probability of stepping back along a reinforced edge from the maximum.
    pub fn p_down_at_max(&self) -> f64 {
        (1.0 + self.delta) / (2.0 + self.delta)
    }

    /// True when the weight `1 + delta` is within 1e-9 of zero; the walk is
    /// then almost ballistic and lattice tables grow to full size.
    pub fn is_near_degenerate(&self) -> bool {
        self.delta + 1.0 < 1e-9
    }
}

/// A (time, maximum) point with its similarity variable `gamma = 2 b^2 / (pi t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub t: f64,
    pub b: f64,
    pub gamma: f64,
}

pub fn gamma_of(t: f64, b: f64) -> Result<GammaPoint> {
    if !(t > 0.0 && t.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(OrwError::domain(format!(
            "gamma needs t > 0 and b > 0, got t = {t}, b = {b}"
        )));
    }
    Ok(GammaPoint {
        t,
        b,
        gamma: 2.0 * b * b / (PI * t),
    })
}

impl GammaPoint {
    /// Lattice correspondence `a^2 / N = gamma * pi / 2` (step count `N`,
    /// maximum `a`).
    pub fn from_lattice(n_steps: usize, a: usize) -> Result<Self> {
        gamma_of(n_steps as f64, a as f64)
    }
}

/// Tolerances and term caps for series, quadrature and inverse Laplace work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    /// Absolute bound on a dropped series tail.
    pub series_tol: f64,
    /// Target absolute error for adaptive quadrature.
    pub quad_tol: f64,
    /// Contour nodes of the inverse Laplace transform.
    pub ilt_terms: usize,
    /// Hard cap on series terms.
    pub max_terms: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            series_tol: 1e-12,
            quad_tol: 1e-10,
            ilt_terms: 32,
            max_terms: 10_000,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.series_tol > 0.0
            && self.quad_tol > 0.0
            && self.max_terms >= 1
            && self.ilt_terms >= 4;
        if ok {
            Ok(())
        } else {
            Err(OrwError::domain(format!("invalid numeric config {self:?}")))
        }
    }
}
