//! Generating functions of the lattice walk in truncated power-series form.
//!
//! `theta` is the small root of `2u - lambda u^2 - lambda = 0`. The diagonal
//! series `P~(lambda, a, a)` follow from a product over `i = 2..a`, the origin
//! series `P~(lambda, 0, a)` from the diagonal, and the double series
//! `sum_x P~(lambda, x, a) u^x` by dividing a known right-hand side by the
//! kernel `2u - lambda u^2 - lambda`. Extracting coefficients reproduces the
//! lattice table of [`crate::discrete`] exactly.

mod series;

use std::io::Write;

use rayon::prelude::*;

pub use series::{BivariateSeries, TruncatedSeries};

use crate::discrete::JointPmf;
use crate::params::ReinforcementParam;
use crate::scalar::{Mode, Scalar};
use crate::{OrwError, Result};

/// Which restatement of the double generating function to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyForm {
    /// Consistent with the boundary relations: factor `lambda` on the
    /// `a = 1` corner term, denominator `1 - theta^2` in `A`, and
    /// `1 + theta^(2i-2)` in the diagonal product.
    #[default]
    Derived,
    /// The alternative form with `lambda^2`, `1 - theta^a` and
    /// `1 - theta^(2i-2)`. Kept to show that it does not reproduce the
    /// lattice law.
    Alternate,
}

/// `theta(lambda) = (1 - sqrt(1 - lambda^2)) / lambda` through `lambda^order`.
pub fn theta_series<T: Scalar>(order: usize) -> TruncatedSeries<T> {
    let inner = TruncatedSeries::new(vec![T::one(), T::zero(), -T::one()], order + 1);
    let root = inner.sqrt().expect("constant term is one");
    let num = &TruncatedSeries::one(order + 1) - &root;
    num.div_lambda()
        .expect("constant term cancels")
        .truncate(order)
}

/// `P~(lambda, 1, 1) = lambda / (1 - lambda^2 (1+delta)/(2+delta))`.
pub fn gf_11<T: Scalar>(delta: f64, order: usize) -> TruncatedSeries<T> {
    let d = T::from_f64_exact(delta);
    let two = T::one() + T::one();
    let w = (T::one() + d.clone()) / (two + d);
    let denom = TruncatedSeries::new(vec![T::one(), T::zero(), -w], order);
    denom.reciprocal().expect("unit constant term").shift(1)
}

/// Shared series for one `(delta, order)`.
struct Kernel<T> {
    order: usize,
    /// `delta / (2 + delta)`.
    w: T,
    /// `2 / (2 + delta)`.
    two_over: T,
    theta: TruncatedSeries<T>,
    /// `theta^k` for `k = 0..powers.len()`.
    powers: Vec<TruncatedSeries<T>>,
    inv_one_minus_theta2: TruncatedSeries<T>,
    p11: TruncatedSeries<T>,
    form: AssemblyForm,
}

impl<T: Scalar> Kernel<T> {
    fn new(delta: f64, order: usize, max_power: usize, form: AssemblyForm) -> Self {
        let d = T::from_f64_exact(delta);
        let two = T::one() + T::one();
        let denom = two.clone() + d.clone();
        let theta = theta_series::<T>(order);
        let mut powers = vec![TruncatedSeries::one(order)];
        for k in 1..=max_power {
            let next = &powers[k - 1] * &theta;
            powers.push(next);
        }
        let one_minus = &TruncatedSeries::one(order) - &powers[2];
        Kernel {
            order,
            w: d / denom.clone(),
            two_over: two / denom,
            inv_one_minus_theta2: one_minus.reciprocal().expect("unit constant term"),
            theta,
            powers,
            p11: gf_11(delta, order),
            form,
        }
    }

    fn theta_pow(&self, k: usize) -> &TruncatedSeries<T> {
        &self.powers[k]
    }

    /// Diagonal series for `a = 1..=a_max`.
    fn diagonals(&self, a_max: usize) -> Vec<TruncatedSeries<T>> {
        let one = TruncatedSeries::one(self.order);
        let step = self.theta.scale(&self.two_over);
        let mut out = vec![self.p11.clone()];
        for i in 2..=a_max {
            let num = &one + self.theta_pow(2 * i);
            let inner = match self.form {
                AssemblyForm::Derived => &one + self.theta_pow(2 * i - 2),
                AssemblyForm::Alternate => &one - self.theta_pow(2 * i - 2),
            };
            let den = &(&one + self.theta_pow(2 * i + 2))
                - &(&inner * self.theta_pow(2)).scale(&self.w);
            let factor = &num * &den.reciprocal().expect("unit constant term");
            let prev = &out[i - 2];
            out.push(&(prev * &step) * &factor);
        }
        out
    }

    /// Origin series from the diagonals `p_aa` and `p_prev` (row `a - 1`).
    fn origin(
        &self,
        a: usize,
        p_aa: &TruncatedSeries<T>,
        p_prev: Option<&TruncatedSeries<T>>,
    ) -> TruncatedSeries<T> {
        let two = T::one() + T::one();
        let mut acc = &(&TruncatedSeries::constant(self.w.clone(), self.order) - self.theta_pow(2))
            * &(self.theta_pow(a) * p_aa);
        if a == 1 {
            acc = &acc + &self.theta_pow(2).scale(&two);
        } else if let Some(prev) = p_prev {
            acc = &acc + &(self.theta_pow(a + 1) * prev).scale(&self.two_over);
        }
        &acc * &self.inv_one_minus_theta2
    }

    /// Right-hand side `R(lambda, u)` of `F (2u - lambda u^2 - lambda) = R`.
    fn rhs(
        &self,
        a: usize,
        p_aa: &TruncatedSeries<T>,
        p_prev: Option<&TruncatedSeries<T>>,
    ) -> BivariateSeries<T> {
        let order = self.order;
        let two = T::one() + T::one();
        let mut r = BivariateSeries::zero(order, a + 2);
        let one = TruncatedSeries::one(order);
        // lambda (u^2 - 1) c  added as  +c u^2, -c u^0  after the shift.
        let add_u2_minus_1 = |r: &mut BivariateSeries<T>, c: &TruncatedSeries<T>| {
            r.add_term(2, c);
            r.add_term(0, &-c);
        };
        if a == 1 {
            r.add_term(2, &TruncatedSeries::monomial(two.clone(), 1, order));
            let corner = (&self.theta_pow(2).scale(&two) * &self.inv_one_minus_theta2)
                .shift(match self.form {
                    AssemblyForm::Derived => 1,
                    AssemblyForm::Alternate => 2,
                });
            add_u2_minus_1(&mut r, &corner);
        }
        // A * P~(a, a)
        let a_den = match self.form {
            AssemblyForm::Derived => self.inv_one_minus_theta2.clone(),
            AssemblyForm::Alternate => (&one - self.theta_pow(a))
                .reciprocal()
                .expect("unit constant term"),
        };
        let w_minus_theta2 = &TruncatedSeries::constant(self.w.clone(), order) - self.theta_pow(2);
        let a_origin = &(&(self.theta_pow(a) * &a_den) * &w_minus_theta2) * p_aa;
        add_u2_minus_1(&mut r, &a_origin.shift(1));
        let lp = p_aa.shift(1);
        r.add_term(a, &lp.scale(&self.w));
        r.add_term(a + 2, &-&lp);
        // B * P~(a-1, a-1)
        if let (true, Some(prev)) = (a > 1, p_prev) {
            let b_origin = (&(self.theta_pow(a + 1) * &self.inv_one_minus_theta2) * prev)
                .scale(&self.two_over);
            add_u2_minus_1(&mut r, &b_origin.shift(1));
            r.add_term(a + 1, &prev.shift(1).scale(&self.two_over));
        }
        r
    }
}

fn negligible<T: Scalar>(v: &T) -> bool {
    match T::MODE {
        Mode::ExactRational => v.is_zero(),
        Mode::Float64 => v.to_f64().abs() <= 1e-12,
    }
}

/// Solves `F (2u - lambda u^2 - lambda) = R` for `F` of `u`-degree `a`.
fn divide_by_kernel<T: Scalar>(r: &BivariateSeries<T>, a: usize) -> Result<BivariateSeries<T>> {
    let order = r.order();
    let two = T::one() + T::one();
    let mut f = BivariateSeries::zero(order, a);
    for n in 0..=order {
        let prev = |f: &BivariateSeries<T>, k: usize| {
            if n == 0 || k > a {
                T::zero()
            } else {
                f.coeff(n - 1, k)
            }
        };
        for k in 1..=a + 1 {
            let mut v = r.coeff(n, k) + prev(&f, k);
            if k >= 2 {
                v = v + prev(&f, k - 2);
            }
            f.set_coeff(n, k - 1, v / two.clone());
        }
        let low = r.coeff(n, 0) + prev(&f, 0);
        let high = r.coeff(n, a + 2) + prev(&f, a);
        if !negligible(&low) || !negligible(&high) {
            return Err(OrwError::Singularity(format!(
                "a = {a}, lambda^{n}: u^0 residual {}, u^{} residual {}",
                low.to_f64(),
                a + 2,
                high.to_f64()
            )));
        }
        for k in a + 3..=r.u_degree() {
            if !negligible(&r.coeff(n, k)) {
                return Err(OrwError::Singularity(format!(
                    "a = {a}, lambda^{n}: right-hand side has u^{k} term"
                )));
            }
        }
    }
    let back = f.mul_kernel().sub(r);
    for x in 0..=back.u_degree() {
        if let Some(c) = back.u_coeff(x).coeffs().iter().find(|c| !negligible(*c)) {
            return Err(OrwError::Singularity(format!(
                "a = {a}: multiplying back leaves {} at u^{x}",
                c.to_f64()
            )));
        }
    }
    Ok(f)
}

/// `P~(lambda, a, a)` through `lambda^order`.
pub fn gf_diag<T: Scalar>(a: usize, delta: f64, order: usize) -> Result<TruncatedSeries<T>> {
    if a == 0 {
        return Err(OrwError::domain("the maximum a starts at 1"));
    }
    let k = Kernel::<T>::new(delta, order, 2 * a + 2, AssemblyForm::Derived);
    Ok(k.diagonals(a).pop().expect("a >= 1"))
}

/// `P~(lambda, 0, a)`: the series of `P{S_N = 0, A_N = a}`.
pub fn gf_origin<T: Scalar>(a: usize, delta: f64, order: usize) -> Result<TruncatedSeries<T>> {
    if a == 0 {
        return Err(OrwError::domain("the maximum a starts at 1"));
    }
    let k = Kernel::<T>::new(delta, order, 2 * a + 2, AssemblyForm::Derived);
    let diag = k.diagonals(a);
    Ok(k.origin(a, &diag[a - 1], a.checked_sub(2).map(|i| &diag[i])))
}

/// Double series `sum_x P~(lambda, x, a) u^x` for `a = 1..=a_max`.
pub fn gf_double_all<T: Scalar>(
    a_max: usize,
    delta: f64,
    order: usize,
    form: AssemblyForm,
) -> Result<Vec<BivariateSeries<T>>> {
    let k = Kernel::<T>::new(delta, order, 2 * a_max + 2, form);
    let diag = k.diagonals(a_max);
    (1..=a_max)
        .into_par_iter()
        .map(|a| {
            let prev = a.checked_sub(2).map(|i| &diag[i]);
            divide_by_kernel(&k.rhs(a, &diag[a - 1], prev), a)
        })
        .collect()
}

/// Double series for a single `a`.
pub fn gf_double<T: Scalar>(
    a: usize,
    delta: f64,
    order: usize,
    form: AssemblyForm,
) -> Result<BivariateSeries<T>> {
    if a == 0 {
        return Err(OrwError::domain("the maximum a starts at 1"));
    }
    Ok(gf_double_all(a, delta, order, form)?.pop().expect("a >= 1"))
}

/// Lattice table at step `n_steps` read off double series computed for
/// `a = 1..` (entry `i` holds `a = i + 1`).
pub fn pmf_from_doubles<T: Scalar>(
    doubles: &[BivariateSeries<T>],
    n_steps: usize,
    param: ReinforcementParam,
) -> JointPmf<T> {
    let a_max = n_steps.min(doubles.len());
    let entries = doubles[..a_max].iter().enumerate().flat_map(|(i, f)| {
        let a = i + 1;
        (0..=a).map(move |x| (x, a, f.coeff(n_steps, x)))
    });
    JointPmf::from_entries(n_steps, param, a_max, entries)
}

/// `P_N(x, a)` extracted from the generating functions, truncating at
/// `lambda^(N+2)`.
pub fn gf_to_pmf<T: Scalar>(
    n_steps: usize,
    param: ReinforcementParam,
    form: AssemblyForm,
) -> Result<JointPmf<T>> {
    if n_steps == 0 {
        return Err(OrwError::domain("the walk is defined from N = 1"));
    }
    let doubles = gf_double_all::<T>(n_steps, param.delta, n_steps + 2, form)?;
    Ok(pmf_from_doubles(&doubles, n_steps, param))
}

/// Writes `a,N,x,coeff` for every nonzero coefficient with `N >= 1`.
pub fn write_coeff_csv<T: Scalar, W: Write>(doubles: &[BivariateSeries<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "N", "x", "coeff"])?;
    for (i, f) in doubles.iter().enumerate() {
        let a = i + 1;
        for n in 1..=f.order() {
            for x in 0..=f.u_degree() {
                let c = f.coeff(n, x);
                if !c.is_zero() {
                    w.write_record([
                        a.to_string(),
                        n.to_string(),
                        x.to_string(),
                        c.to_table_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{dp_evolve, DpConfig};
    use crate::make_param;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn theta_leading_terms() {
        let t = theta_series::<Q>(7);
        assert_eq!(t.coeff(1), q(1, 2));
        assert_eq!(t.coeff(3), q(1, 8));
        assert_eq!(t.coeff(5), q(1, 16));
        assert!((0..=7).step_by(2).all(|n| t.coeff(n).is_zero()));
    }

    #[test]
    fn theta_solves_quadratic() {
        let k = 15;
        let t = theta_series::<Q>(k);
        let lam = TruncatedSeries::monomial(Q::one(), 1, k);
        let lhs = &(&t.scale(&q(2, 1)) - &(&lam * &(&t * &t))) - &lam;
        assert!(lhs.is_zero());
        // The two roots of lambda u^2 - 2u + lambda multiply to one; the
        // large root is (1 + sqrt(1 - lambda^2)) / lambda = 2/lambda - theta.
        // theta * large = 2 theta / lambda - theta^2, and 2 theta - lambda
        // theta^2 = lambda.
        let prod = (&t.scale(&q(2, 1)) - &(&lam * &(&t * &t))).div_lambda().unwrap();
        assert_eq!(prod.truncate(k - 1), TruncatedSeries::one(k - 1));
    }

    #[test]
    fn corner_series() {
        let g0 = gf_11::<Q>(0.0, 5);
        assert_eq!(g0.coeff(1), Q::one());
        assert_eq!(g0.coeff(3), q(1, 2));
        let g4 = gf_11::<Q>(4.0, 21);
        assert_eq!(g4.coeff(21), (0..10).fold(Q::one(), |a, _| a * q(5, 6)));
        assert!(g4.coeff(20).is_zero());
    }

    #[test]
    fn diagonal_and_origin_small_cases() {
        assert_eq!(gf_diag::<Q>(1, 3.0, 9).unwrap(), gf_11::<Q>(3.0, 9));
        assert_eq!(gf_diag::<Q>(2, 0.0, 6).unwrap().coeff(2), q(1, 2));
        assert_eq!(gf_diag::<Q>(2, 4.0, 6).unwrap().coeff(2), q(1, 6));
        assert_eq!(gf_origin::<Q>(1, 0.0, 6).unwrap().coeff(2), q(1, 2));
        assert_eq!(gf_origin::<Q>(1, 4.0, 6).unwrap().coeff(2), q(5, 6));
        let o3 = gf_origin::<Q>(3, 1.0, 10).unwrap();
        // Reaching 3 and coming back to 0 takes 2 + 3 steps after N = 1.
        assert!((0..6).all(|n| o3.coeff(n).is_zero()));
        assert!(!o3.coeff(6).is_zero());
    }

    #[test]
    fn double_series_small_cases() {
        for d in [0.0, 1.0, 4.0] {
            let f = gf_double::<Q>(1, d, 5, AssemblyForm::Derived).unwrap();
            assert_eq!(f.coeff(1, 1), Q::one());
        }
        let f = gf_double::<Q>(2, 0.0, 5, AssemblyForm::Derived).unwrap();
        assert_eq!(f.coeff(3, 1), q(1, 4));
    }

    #[test]
    fn matches_lattice_recursion() {
        for d in [0.0, 0.5, 3.0] {
            let p = make_param(d).unwrap();
            for n in [1, 2, 5, 12] {
                let gf: JointPmf<Q> = gf_to_pmf(n, p, AssemblyForm::Derived).unwrap();
                let dp: JointPmf<Q> = dp_evolve(n, p, &DpConfig::default()).unwrap();
                assert_eq!(gf, dp, "delta {d}, N {n}");
            }
        }
    }

    #[test]
    fn alternate_form_is_rejected() {
        let err = gf_to_pmf::<Q>(6, make_param(4.0).unwrap(), AssemblyForm::Alternate).unwrap_err();
        assert!(matches!(err, OrwError::Singularity(_)));
    }

    #[test]
    fn float_mode_matches_exact() {
        let p = make_param(2.0).unwrap();
        let exact: JointPmf<Q> = gf_to_pmf(14, p, AssemblyForm::Derived).unwrap();
        let float: JointPmf<f64> = gf_to_pmf(14, p, AssemblyForm::Derived).unwrap();
        for (x, a, v) in exact.nonzero() {
            assert!((float.get(x, a) - v.to_f64()).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficient_csv() {
        let doubles = gf_double_all::<Q>(1, 4.0, 2, AssemblyForm::Derived).unwrap();
        let mut buf = Vec::new();
        write_coeff_csv(&doubles, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,N,x,coeff\n1,1,1,1/1\n1,2,0,5/6\n");
    }
}
