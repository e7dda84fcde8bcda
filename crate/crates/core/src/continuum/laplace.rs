use num_complex::Complex64;

use crate::special::{logcosh, logcosh_c, logsinh_c};
use crate::{OrwError, Result};

/// A Laplace-domain density, evaluated through its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaplaceField {
    /// Joint density of (position `y`, maximum `b`).
    Joint { y: f64, b: f64, delta: f64 },
    /// Density of the maximum `b` alone.
    Maximum { b: f64, delta: f64 },
}

impl LaplaceField {
    pub fn joint(y: f64, b: f64, delta: f64) -> Result<Self> {
        check_b(b)?;
        if y < 0.0 {
            return Err(OrwError::domain(format!("position must be >= 0, got {y}")));
        }
        Ok(LaplaceField::Joint { y, b, delta })
    }

    pub fn maximum(b: f64, delta: f64) -> Result<Self> {
        check_b(b)?;
        Ok(LaplaceField::Maximum { b, delta })
    }

    /// True where the field vanishes identically (`y > b`).
    pub fn is_zero(&self) -> bool {
        matches!(*self, LaplaceField::Joint { y, b, .. } if y > b)
    }

    /// Logarithm of the transform at complex `s` (`Re s > 0` or on an
    /// inversion contour). Meaningless where [`Self::is_zero`] holds.
    pub fn log_eval(&self, s: Complex64) -> Complex64 {
        let root = (2.0 * s).sqrt();
        match *self {
            LaplaceField::Joint { y, b, delta } => {
                (2.0 + delta).ln() + logcosh_c(root * y) - (2.0 + delta / 2.0) * logcosh_c(root * b)
            }
            LaplaceField::Maximum { b, delta } => {
                let z = root * b;
                let log_sinh = if z.norm() < 0.5 { z.sinh().ln() } else { logsinh_c(z) };
                (2.0 + delta).ln() - root.ln() + log_sinh - (2.0 + delta / 2.0) * logcosh_c(z)
            }
        }
    }

    /// Value at real `s > 0`.
    pub fn eval(&self, s: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.log_eval(Complex64::new(s, 0.0)).re.exp()
        }
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(OrwError::domain(format!("maximum must be > 0, got {b}")))
    }
}

/// Laplace transform in time of the joint density,
/// `(2 + delta) cosh(y sqrt(2s)) / cosh(b sqrt(2s))^(2 + delta/2)`, zero
/// for `y > b`.
pub fn laplace_joint(s: f64, y: f64, b: f64, delta: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(OrwError::domain(format!("real transform variable must be > 0, got {s}")));
    }
    let field = LaplaceField::joint(y, b, delta)?;
    if field.is_zero() {
        return Ok(0.0);
    }
    let r = (2.0 * s).sqrt();
    Ok(((2.0 + delta).ln() + logcosh(r * y) - (2.0 + delta / 2.0) * logcosh(r * b)).exp())
}

/// Complex-`s` version of [`laplace_joint`].
pub fn laplace_joint_c(s: Complex64, y: f64, b: f64, delta: f64) -> Result<Complex64> {
    let field = LaplaceField::joint(y, b, delta)?;
    if field.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(field.log_eval(s).exp())
}

/// Laplace transform of the maximum density,
/// `(2 + delta) sinh(b sqrt(2s)) / (sqrt(2s) cosh(b sqrt(2s))^(2 + delta/2))`.
pub fn laplace_maximum(s: f64, b: f64, delta: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(OrwError::domain(format!("real transform variable must be > 0, got {s}")));
    }
    Ok(LaplaceField::maximum(b, delta)?.eval(s))
}
