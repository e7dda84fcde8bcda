//! Scalar field abstraction so the lattice recursion and the power-series
//! engine run both in `f64` and in exact rationals.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Arithmetic mode of a table or series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Float64,
    ExactRational,
}

pub trait Scalar:
    Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const MODE: Mode;

    /// Converts a float exactly (rationals take the binary expansion).
    fn from_f64_exact(v: f64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Text used in exported tables: 17 significant digits or `p/q`.
    fn to_table_string(&self) -> String;

    fn is_negative(&self) -> bool;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float64;

    fn from_f64_exact(v: f64) -> Self {
        v
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_table_string(&self) -> String {
        crate::fmt_f64(*self)
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::ExactRational;

    fn from_f64_exact(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_table_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn is_negative(&self) -> bool {
        self < &BigRational::zero()
    }
}

/// Transition weights of the walk in the requested scalar type.
#[derive(Debug, Clone)]
pub struct StepWeights<T> {
    pub half: T,
    /// From the maximum onto a fresh edge: `1/(2+delta)`.
    pub up_at_max: T,
    /// From the maximum back along the reinforced edge: `(1+delta)/(2+delta)`.
    pub down_at_max: T,
    pub delta: T,
}

impl<T: Scalar> StepWeights<T> {
    pub fn new(delta: f64) -> Self {
        let d = T::from_f64_exact(delta);
        let one = T::one();
        let two = one.clone() + one.clone();
        let denom = two.clone() + d.clone();
        StepWeights {
            half: one.clone() / two,
            up_at_max: one.clone() / denom.clone(),
            down_at_max: (one + d.clone()) / denom,
            delta: d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn exact_weights_sum_to_one() {
        let w = StepWeights::<BigRational>::new(4.0);
        assert_eq!(w.up_at_max, BigRational::from_ratio(1, 6));
        assert_eq!(w.up_at_max.clone() + w.down_at_max.clone(), BigRational::one());
        assert_eq!(w.half.to_table_string(), "1/2");
    }

    #[test]
    fn float_formatting_has_17_digits() {
        let s = 0.1f64.to_table_string();
        assert_eq!(s, "1.0000000000000001e-1");
    }
}
