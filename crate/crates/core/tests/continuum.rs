use std::f64::consts::PI;

use orw_core::continuum::*;
use orw_core::quad::Quadrature;
use orw_core::NumericConfig;

fn b_for(gamma: f64, t: f64) -> f64 {
    (gamma * PI * t / 2.0).sqrt()
}

#[test]
fn direct_and_dual_series_agree() {
    let cfg = NumericConfig::default();
    for m in [0u32, 1, 2, 3] {
        for gamma in [0.2, 0.5, 1.0, 2.0, 5.0] {
            let b = b_for(gamma, 1.0);
            let d = q_series(1.0, b, 4.0 * m as f64, &cfg).unwrap();
            let p = q_poisson(1.0, b, m, &cfg).unwrap();
            assert!(
                (d.value - p.value).abs() < 1e-10,
                "m {m} gamma {gamma}: {} vs {}",
                d.value,
                p.value
            );
        }
    }
}

#[test]
fn series_match_inversion() {
    let cfg = NumericConfig::default();
    for delta in [0.0, 1.0, 4.0, 2.5] {
        for gamma in [0.1, 0.7, 3.0] {
            let b = b_for(gamma, 1.3);
            let a = q_auto(1.3, b, delta, &cfg).unwrap();
            let i = q_ilt(1.3, b, delta, &cfg).unwrap();
            assert!((a.value - i.value).abs() < 1e-9, "delta {delta} gamma {gamma}: {a:?} {i:?}");
        }
    }
}

#[test]
fn maximum_density_normalized() {
    let cfg = NumericConfig::default();
    let q = Quadrature::new(1e-10);
    for delta in [0.0, 1.0, 4.0] {
        let r = q
            .integrate_to_infinity(|b| if b == 0.0 { 0.0 } else { q_auto(1.0, b, delta, &cfg).unwrap().value }, 0.0)
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "delta {delta}: {}", r.value);
    }
}

#[test]
fn walker_series_matches_joint_inversion() {
    let cfg = NumericConfig::default();
    for m in [1u32, 2] {
        for y in [0.4, 1.0, 1.8] {
            let s = p_series(1.0, y, m, &cfg).unwrap();
            let j = walker_marginal_from_joint(1.0, y, 4.0 * m as f64, &cfg).unwrap();
            assert!((s.value - j.value).abs() < 1e-8, "m {m} y {y}: {s:?} {j:?}");
        }
    }
}
