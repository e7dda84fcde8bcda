//! Property-based checks on random inputs.

use num_rational::BigRational;
use num_traits::One;
use orw_core::continuum::laplace_joint;
use orw_core::discrete::{dp_evolve, DpConfig};
use orw_core::genfunc::{gf_diag, theta_series, TruncatedSeries};
use orw_core::make_param;
use orw_core::moments::{max_moment, walker_mean};
use orw_core::NumericConfig;
use proptest::prelude::*;

type Q = BigRational;
const K: usize = 8;

fn series() -> impl Strategy<Value = TruncatedSeries<Q>> {
    prop::collection::vec((-9i64..10, 1i64..6), K + 1)
        .prop_map(|v| TruncatedSeries::new(v.into_iter().map(|(n, d)| Q::new(n.into(), d.into())).collect(), K))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn reciprocal_inverts(mut a in series()) {
        let mut c = a.coeffs().to_vec();
        c[0] = Q::one();
        a = TruncatedSeries::new(c, K);
        prop_assert_eq!(&a * &a.reciprocal().unwrap(), TruncatedSeries::one(K));
    }

    #[test]
    fn lattice_law_invariants(n in 1usize..80, delta in -0.95f64..8.0) {
        let p = dp_evolve::<f64>(n, make_param(delta).unwrap(), &DpConfig::default()).unwrap();
        prop_assert!((p.total_mass() - 1.0).abs() < 1e-12);
        for (x, a, &v) in p.nonzero() {
            prop_assert!(v >= 0.0);
            prop_assert!(x <= a && a <= n);
            prop_assert_eq!(x % 2, n % 2);
        }
    }

    #[test]
    fn diagonal_coefficients_are_probabilities(a in 1usize..6, d in 0i64..5) {
        let s = gf_diag::<Q>(a, d as f64, 16).unwrap();
        for c in s.coeffs() {
            prop_assert!(c >= &Q::from_integer(0.into()) && c <= &Q::one());
        }
    }

    #[test]
    fn laplace_equations(s in 0.2f64..5.0, b in 0.2f64..2.0, delta in 0.0f64..6.0, frac in 0.1f64..0.9) {
        let f = |y: f64, bb: f64| laplace_joint(s, y, bb, delta).unwrap();
        let (y, h) = (frac * b, 1e-4);
        let ode = s * f(y, b) - 0.5 * (f(y + h, b) - 2.0 * f(y, b) + f(y - h, b)) / (h * h);
        prop_assert!((ode / (s * f(y, b))).abs() < 1e-6);
        let h = 1e-5;
        let dy = (3.0 * f(b, b) - 4.0 * f(b - h, b) + f(b - 2.0 * h, b)) / (2.0 * h);
        let db = (-3.0 * f(b, b) + 4.0 * f(b, b + h) - f(b, b + 2.0 * h)) / (2.0 * h);
        prop_assert!(((1.0 + delta / 4.0) * dy + 0.5 * db).abs() < 1e-6 * dy.abs());
        let d0 = (-3.0 * f(0.0, b) + 4.0 * f(h, b) - f(2.0 * h, b)) / (2.0 * h);
        prop_assert!(d0.abs() < 1e-6 * f(0.0, b) * (2.0 * s).sqrt());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn moments_scale_with_time(c in 0.2f64..5.0, m in 0.0f64..4.0) {
        let cfg = NumericConfig::default();
        let r = max_moment(2, c * c, m, &cfg).unwrap().value / max_moment(2, 1.0, m, &cfg).unwrap().value;
        prop_assert!((r - c * c).abs() < 1e-12 * c * c);
        let r = walker_mean(c * c, m, &cfg).unwrap().value / walker_mean(1.0, m, &cfg).unwrap().value;
        prop_assert!((r - c).abs() < 1e-12 * c);
    }
}

#[test]
fn theta_root_relations() {
    let th = theta_series::<Q>(21);
    let lambda = TruncatedSeries::monomial(Q::one(), 1, 21);
    let two = TruncatedSeries::constant(Q::from_integer(2.into()), 21);
    let lhs = &(&(&two * &th) - &(&lambda * &(&th * &th))) - &lambda;
    assert!(lhs.is_zero());
}
