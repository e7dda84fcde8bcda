use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::Scalar;

/// Power series in `lambda` truncated after `lambda^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Builds a series of the given order, padding or dropping coefficients.
    pub fn new(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    /// `c * lambda^k`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Multiplies by `lambda^k`.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for n in k..=order {
            out.coeffs[n] = self.coeffs[n - k].clone();
        }
        out
    }

    /// Divides by `lambda`; the constant term must vanish. The result keeps
    /// the same nominal order with a zero top coefficient, so callers should
    /// treat its last coefficient as unknown.
    pub fn div_lambda(&self) -> Option<Self> {
        if !self.coeffs[0].is_zero() {
            return None;
        }
        let mut coeffs: Vec<T> = self.coeffs[1..].to_vec();
        coeffs.push(T::zero());
        Some(TruncatedSeries { coeffs })
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut out = Self::one(self.order());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Multiplicative inverse; `None` when the constant term is zero.
    pub fn reciprocal(&self) -> Option<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return None;
        }
        let inv0 = T::one() / c0.clone();
        let order = self.order();
        let mut b = Vec::with_capacity(order + 1);
        b.push(inv0.clone());
        for n in 1..=order {
            let mut s = T::zero();
            for k in 1..=n {
                s = s + self.coeffs[k].clone() * b[n - k].clone();
            }
            b.push(-(s * inv0.clone()));
        }
        Some(TruncatedSeries { coeffs: b })
    }

    /// Square root of a series with constant term 1.
    pub fn sqrt(&self) -> Option<Self> {
        if !self.coeffs[0].is_one() {
            return None;
        }
        let two = T::one() + T::one();
        let order = self.order();
        let mut s: Vec<T> = Vec::with_capacity(order + 1);
        s.push(T::one());
        for n in 1..=order {
            let mut acc = self.coeffs[n].clone();
            for k in 1..n {
                acc = acc - s[k].clone() * s[n - k].clone();
            }
            s.push(acc / two.clone());
        }
        Some(TruncatedSeries { coeffs: s })
    }

    /// Value of the truncated polynomial at a point.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * lambda + c.to_f64())
    }
}

impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn add(self, rhs: Self) -> TruncatedSeries<T> {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|n| self.coeffs[n].clone() + rhs.coeffs[n].clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn sub(self, rhs: Self) -> TruncatedSeries<T> {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|n| self.coeffs[n].clone() - rhs.coeffs[n].clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        let order = self.order().min(rhs.order());
        let mut out = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

/// Polynomial in `u` whose coefficients are truncated series in `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries<T> {
    order: usize,
    /// `by_u[x]` is the coefficient of `u^x`.
    by_u: Vec<TruncatedSeries<T>>,
}

impl<T: Scalar> BivariateSeries<T> {
    pub fn zero(order: usize, u_degree: usize) -> Self {
        BivariateSeries {
            order,
            by_u: vec![TruncatedSeries::zero(order); u_degree + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Highest stored power of `u`.
    pub fn u_degree(&self) -> usize {
        self.by_u.len() - 1
    }

    /// Coefficient of `lambda^n u^x`.
    pub fn coeff(&self, n: usize, x: usize) -> T {
        self.by_u.get(x).map_or_else(T::zero, |s| s.coeff(n))
    }

    pub fn u_coeff(&self, x: usize) -> &TruncatedSeries<T> {
        &self.by_u[x]
    }

    /// Adds `s * u^x`, growing the `u` degree if needed.
    pub fn add_term(&mut self, x: usize, s: &TruncatedSeries<T>) {
        if x >= self.by_u.len() {
            self.by_u.resize(x + 1, TruncatedSeries::zero(self.order));
        }
        self.by_u[x] = &self.by_u[x] + s;
    }

    pub(crate) fn set_coeff(&mut self, n: usize, x: usize, c: T) {
        self.by_u[x].coeffs[n] = c;
    }

    /// Product with `2u - lambda u^2 - lambda`.
    pub fn mul_kernel(&self) -> Self {
        let mut out = Self::zero(self.order, self.u_degree() + 2);
        let two = T::one() + T::one();
        for (x, s) in self.by_u.iter().enumerate() {
            out.add_term(x + 1, &s.scale(&two));
            let ls = s.shift(1);
            out.add_term(x + 2, &-&ls);
            out.add_term(x, &-&ls);
        }
        out
    }

    /// Difference with another bivariate series, padded to the larger degree.
    pub fn sub(&self, other: &Self) -> Self {
        let deg = self.u_degree().max(other.u_degree());
        let mut out = Self::zero(self.order.min(other.order), deg);
        for (x, s) in self.by_u.iter().enumerate() {
            out.add_term(x, s);
        }
        for (x, s) in other.by_u.iter().enumerate() {
            out.add_term(x, &-s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.by_u.iter().all(TruncatedSeries::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn reciprocal_of_geometric() {
        let s = TruncatedSeries::new(vec![q(1, 1), q(-1, 3)], 6);
        let r = s.reciprocal().unwrap();
        for n in 0..=6 {
            assert_eq!(r.coeff(n), (0..n).fold(q(1, 1), |a, _| a * q(1, 3)));
        }
        assert!(TruncatedSeries::new(vec![q(0, 1), q(1, 1)], 3).reciprocal().is_none());
    }

    #[test]
    fn sqrt_squares_back() {
        let s = TruncatedSeries::new(vec![q(1, 1), q(2, 5), q(-7, 3), q(1, 9)], 10);
        let r = s.sqrt().unwrap();
        assert_eq!(&r * &r, s);
        assert!(TruncatedSeries::new(vec![q(4, 1)], 3).sqrt().is_none());
    }

    #[test]
    fn shift_and_divide() {
        let s = TruncatedSeries::new(vec![q(1, 1), q(2, 1), q(3, 1)], 4);
        let t = s.shift(1);
        assert_eq!(t.coeffs(), &[q(0, 1), q(1, 1), q(2, 1), q(3, 1), q(0, 1)]);
        assert_eq!(t.div_lambda().unwrap(), s);
        assert!(s.div_lambda().is_none());
    }

    #[test]
    fn powers() {
        let s = TruncatedSeries::new(vec![q(1, 1), q(1, 1)], 5);
        let p = s.powi(3);
        assert_eq!(p.coeffs()[..4], [q(1, 1), q(3, 1), q(3, 1), q(1, 1)]);
        assert_eq!(s.powi(0), TruncatedSeries::one(5));
    }
}
