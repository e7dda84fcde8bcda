//! Independent oracles for the lattice law.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use orw_core::discrete::{dp_evolve, marginal_maximum, mc_simulate, DpConfig, JointPmf, McConfig};
use orw_core::make_param;

type Q = BigRational;

/// Exact law of `(S_N, A_N)` by enumerating every path and weighting each
/// step by the ratio of incident edge weights (visited edges weigh
/// `1 + delta`).
fn enumerate(n: usize, delta: Q) -> BTreeMap<(usize, usize), Q> {
    fn go(x: usize, visited: &mut Vec<bool>, steps: usize, p: Q, delta: &Q, out: &mut BTreeMap<(usize, usize), Q>) {
        if steps == 0 {
            let a = visited.iter().rposition(|&v| v).unwrap() + 1;
            *out.entry((x, a)).or_insert_with(Q::zero) += p;
            return;
        }
        if visited.len() <= x + 1 {
            visited.resize(x + 2, false);
        }
        let w = |e: usize, vis: &Vec<bool>| if vis[e] { Q::one() + delta } else { Q::one() };
        if x == 0 {
            go(1, visited, steps - 1, p, delta, out);
            return;
        }
        let (left, right) = (w(x - 1, visited), w(x, visited));
        let total = left.clone() + right.clone();
        let fresh = !visited[x];
        visited[x] = true;
        go(x + 1, visited, steps - 1, p.clone() * right / total.clone(), delta, out);
        visited[x] = !fresh;
        go(x - 1, visited, steps - 1, p * left / total, delta, out);
    }
    let mut out = BTreeMap::new();
    // Edge e joins e and e+1; the walk starts at 1 having crossed edge 0.
    let mut visited = vec![true];
    go(1, &mut visited, n - 1, Q::one(), &delta, &mut out);
    out
}

#[test]
fn recursion_matches_path_enumeration() {
    for (num, den) in [(0, 1), (1, 1), (4, 1), (-1, 2)] {
        let delta = Q::new(num.into(), den.into());
        let param = make_param(num as f64 / den as f64).unwrap();
        for n in 1..=12 {
            let paths = enumerate(n, delta.clone());
            let dp: JointPmf<Q> = dp_evolve(n, param, &DpConfig::default()).unwrap();
            let table: BTreeMap<_, _> = dp.nonzero().map(|(x, a, p)| ((x, a), p.clone())).collect();
            assert_eq!(table, paths, "delta {num}/{den}, N {n}");
        }
    }
}

#[test]
fn unreinforced_position_is_reflected_walk() {
    // With delta = 0 the position alone is a simple walk reflected at 0.
    let param = make_param(0.0).unwrap();
    let mut law = vec![0.0; 16];
    law[1] = 1.0;
    for n in 1..12 {
        let mut next = vec![0.0; 16];
        for (x, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            } else if x == 0 {
                next[1] += p;
            } else {
                next[x - 1] += p / 2.0;
                next[x + 1] += p / 2.0;
            }
        }
        law = next;
        let dp = dp_evolve::<f64>(n + 1, param, &DpConfig::default()).unwrap();
        let pos = orw_core::discrete::marginal_position(&dp);
        for x in 0..=n + 1 {
            assert!((pos[x] - law[x]).abs() < 1e-15);
        }
    }
}

#[test]
fn two_step_maximum_by_simulation() {
    let param = make_param(0.0).unwrap();
    let mc = mc_simulate(2, param, 1_000_000, &McConfig::default()).unwrap();
    let f = mc.frequency(2, 2);
    assert!((f - 0.5).abs() <= 3.0 * 0.5 / 1e3, "{f}");
}

#[test]
fn return_probability_by_simulation() {
    let param = make_param(4.0).unwrap();
    let p = (5.0f64 / 6.0).powi(10);
    let mc = mc_simulate(21, param, 400_000, &McConfig { seed: 7, batch_size: 50_000 }).unwrap();
    assert!((mc.frequency(1, 1) - p).abs() <= 4.0 * mc.std_error(p));
}

#[test]
fn simulation_matches_recursion_for_fractional_delta() {
    let param = make_param(1.5).unwrap();
    let n_walks = 400_000;
    let mc = mc_simulate(60, param, n_walks, &McConfig::default()).unwrap();
    let dp = dp_evolve::<f64>(60, param, &DpConfig::default()).unwrap();
    let (mut cells, mut inside) = (0, 0);
    for (x, a, &p) in dp.nonzero() {
        if p >= 1e-3 {
            cells += 1;
            inside += ((mc.frequency(x, a) - p).abs() <= 4.0 * mc.std_error(p)) as usize;
        }
    }
    assert!(inside as f64 >= 0.99 * cells as f64, "{inside}/{cells}");
    let total: u64 = mc.counts.values().sum();
    assert_eq!(total, n_walks);
}

#[test]
fn maximum_marginal_of_two_steps() {
    let dp = dp_evolve::<f64>(2, make_param(4.0).unwrap(), &DpConfig::default()).unwrap();
    let m = marginal_maximum(&dp);
    assert!((m[2] - 1.0 / 6.0).abs() < 1e-15);
    assert!((m[1] - 5.0 / 6.0).abs() < 1e-15);
}
