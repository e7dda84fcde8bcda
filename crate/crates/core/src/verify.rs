//! Acceptance checks A1 to A10.
//!
//! Each check runs at its stated tolerance and returns a [`CriterionReport`]
//! with the measured quantities. Where a stated target value disagrees with
//! an independent computation the report says so in its notes; the check is
//! still judged against the stated target.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bridge::{self, BoundBand, DeltaMapping};
use crate::continuum::{
    laplace_joint, max_marginal_from_joint, p_series, poisson_terms, q_auto, q_poisson, q_series,
    walker_marginal_from_joint, Method,
};
use crate::discrete::{dp_evolve, mc_simulate, DpConfig, JointPmf, McConfig};
use crate::genfunc::{gf_11, gf_to_pmf, AssemblyForm};
use crate::moments::{
    max_moment, walker_mean, walker_moment_laplace, walker_second_moment, walker_second_moment_alt_prefactor,
};
use crate::params::{make_param, NumericConfig};
use crate::quad::Quadrature;
use crate::special::CATALAN;
use crate::Result;

/// Identifiers of every criterion, in order.
pub const ALL: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    /// One-line summary, `A<id> PASS|FAIL title: measured (time)`.
    pub fn line(&self) -> String {
        format!(
            "A{:<2} {} {}: {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.measured,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

fn title(id: u32) -> &'static str {
    match id {
        1 => "generating functions equal the lattice recursion",
        2 => "return probabilities P_{2N+1}(1,1)",
        3 => "Monte Carlo agrees with the lattice recursion",
        4 => "direct and dual maximum series agree",
        5 => "inverse Laplace transform matches the series",
        6 => "small-m walker moments",
        7 => "large-m asymptotics",
        8 => "normalizations",
        9 => "diffusion scaling convergence",
        10 => "two-sided bounds on a P{A_N = a}",
        _ => "unknown criterion",
    }
}

struct Outcome {
    passed: bool,
    measured: String,
    notes: Vec<String>,
}

/// Runs one criterion. Errors raised inside a check become failures.
pub fn run(id: u32, cfg: &NumericConfig) -> CriterionReport {
    let start = Instant::now();
    let out = match id {
        1 => a1(),
        2 => a2(),
        3 => a3(),
        4 => a4(cfg),
        5 => a5(cfg),
        6 => a6(cfg),
        7 => a7(cfg),
        8 => a8(cfg),
        9 => a9(cfg),
        10 => a10(),
        _ => Err(crate::OrwError::domain(format!("no criterion A{id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut out = out.unwrap_or_else(|e| Outcome {
        passed: false,
        measured: format!("error: {e}"),
        notes: vec![],
    });
    let limit = match id {
        1 => Some(30.0),
        3 => Some(60.0),
        9 => Some(300.0),
        _ => None,
    };
    if let Some(limit) = limit {
        if seconds >= limit {
            out.passed = false;
            out.notes.push(format!("runtime {seconds:.1} s exceeds {limit} s"));
        }
    }
    CriterionReport {
        id,
        title: title(id),
        passed: out.passed,
        measured: out.measured,
        notes: out.notes,
        seconds,
    }
}

/// Runs the given criteria in order.
pub fn run_suite(ids: &[u32], cfg: &NumericConfig) -> SuiteReport {
    let criteria: Vec<_> = ids.iter().map(|&id| run(id, cfg)).collect();
    SuiteReport {
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

type Q = BigRational;

fn a1() -> Result<Outcome> {
    let mut checked = 0;
    let mut bad = vec![];
    for delta in [0.0, 2.0, 4.0] {
        let param = make_param(delta)?;
        for n in 1..=24 {
            let gf: JointPmf<Q> = gf_to_pmf(n, param, AssemblyForm::Derived)?;
            let dp: JointPmf<Q> = dp_evolve(n, param, &DpConfig::default())?;
            checked += 1;
            if gf != dp {
                bad.push(format!("delta {delta}, N {n}"));
            }
        }
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        measured: format!("{} of {checked} tables identical as exact rationals", checked - bad.len()),
        notes: bad,
    })
}

fn a2() -> Result<Outcome> {
    let mut bad = vec![];
    for d in [0i64, 1, 4] {
        let r = Q::new((1 + d).into(), (2 + d).into());
        let param = make_param(d as f64)?;
        let gf = gf_11::<Q>(d as f64, 25);
        for n in 0..=12usize {
            let want: Q = Pow::pow(&r, n as u32);
            let dp: JointPmf<Q> = dp_evolve(2 * n + 1, param, &DpConfig::default())?;
            if dp.get(1, 1) != want || gf.coeff(2 * n + 1) != want {
                bad.push(format!("delta {d}, N {n}"));
            }
        }
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        measured: format!("{} mismatches over N <= 12, delta in {{0,1,4}}", bad.len()),
        notes: bad,
    })
}

fn a3() -> Result<Outcome> {
    let n_walks = 1_000_000u64;
    let mut parts = vec![];
    let mut passed = true;
    for delta in [0.0, 4.0] {
        let param = make_param(delta)?;
        let dp = dp_evolve::<f64>(200, param, &DpConfig::default())?;
        let mc = mc_simulate(200, param, n_walks, &McConfig::default())?;
        let (mut cells, mut inside) = (0usize, 0usize);
        for (x, a, &p) in dp.nonzero() {
            if p >= 1e-3 {
                cells += 1;
                if (mc.frequency(x, a) - p).abs() <= 4.0 * mc.std_error(p) {
                    inside += 1;
                }
            }
        }
        let frac = inside as f64 / cells as f64;
        passed &= frac >= 0.99;
        parts.push(format!("delta {delta}: {inside}/{cells} cells within 4 s.e."));
    }
    Ok(Outcome {
        passed,
        measured: parts.join("; "),
        notes: vec![],
    })
}

/// The three sums of the dual `m = 1` representation in the target
/// normalization: `(1/g) S1 - (6/(pi g^2)) S1 + (1/g^3) S3` with
/// `S_k = sum_{j in Z} (-1)^j (2j+1)^k e^(-pi (2j+1)^2 / (4g))`.
fn target_m1_dual(g: f64) -> [f64; 3] {
    let (mut s1, mut s3) = (0.0, 0.0);
    for j in 0..40 {
        let w = 2.0 * j as f64 + 1.0;
        let e = (-1f64).powi(j) * (-PI * w * w / (4.0 * g)).exp();
        // j and -1-j contribute equally.
        s1 += 2.0 * w * e;
        s3 += 2.0 * w * w * w * e;
    }
    [s1 / g, -6.0 / (PI * g * g) * s1, s3 / (g * g * g)]
}

fn a4(cfg: &NumericConfig) -> Result<Outcome> {
    let t = 1.0;
    let mut worst = 0.0f64;
    for (delta, m) in [(0.0, 0), (4.0, 1)] {
        for g in [0.2, 0.5, 1.0, 2.0, 5.0] {
            let b = (PI * g * t / 2.0).sqrt();
            let d = q_series(t, b, delta, cfg)?.value;
            let p = q_poisson(t, b, m, cfg)?.value;
            worst = worst.max((d - p).abs());
        }
    }
    // Term-by-term comparison of the m = 1 assembly with the target sums.
    let terms = poisson_terms(1);
    let mut ratios = vec![];
    for (k, gamma_power) in [(0u32, -1.0), (0, -2.0), (1, -3.0)] {
        let ours = terms
            .iter()
            .find(|x| x.beta_power == k && x.gamma_power == gamma_power)
            .map(|x| x.coeff * (PI / 4.0).powi(k as i32));
        let target = match gamma_power as i32 {
            -1 => 1.0,
            -2 => -6.0 / PI,
            _ => 1.0,
        };
        ratios.push(ours.map(|o| o / target));
    }
    let common = ratios[0];
    let same_structure = terms.len() == 3
        && common.is_some()
        && ratios.iter().all(|r| r.zip(common).is_some_and(|(r, c)| (r - c).abs() < 1e-15));
    // The target sums integrate (over b) to twice the unit mass.
    let target_mass = Quadrature::new(1e-10)
        .integrate_to_infinity(
            |b| {
                if b == 0.0 {
                    return 0.0;
                }
                let g = 2.0 * b * b / (PI * t);
                target_m1_dual(g).iter().sum::<f64>() / b
            },
            0.0,
        )?
        .value;
    let passed = worst <= 1e-10 && same_structure;
    Ok(Outcome {
        passed,
        measured: format!(
            "max |direct - dual| = {worst:.2e}; m=1 assembly has the three target sums, each scaled by {}",
            common.map_or("?".into(), |c| format!("{c}"))
        ),
        notes: vec![format!(
            "the target three-sum expression integrates to {target_mass:.6} over b; its common factor 2 comes from the theta-dual prefactor 2/g^(3/2), which is 1/g^(3/2)"
        )],
    })
}

fn a5(cfg: &NumericConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa5);
    let (mut worst_q, mut worst_p) = (0.0f64, 0.0f64);
    let mut notes = vec![];
    for m in 0..=2u32 {
        let delta = 4.0 * m as f64;
        for _ in 0..20 {
            let t: f64 = rng.random_range(0.5..2.0);
            let b = t.sqrt() * rng.random_range(0.2..2.5);
            let y = t.sqrt() * rng.random_range(0.6..2.0);
            let q = q_auto(t, b, delta, cfg)?.value;
            let qj = max_marginal_from_joint(t, b, delta, cfg)?.value;
            worst_q = worst_q.max((q - qj).abs());
            let p = p_series(t, y, m, cfg)?;
            if p.method != Method::DirectSeries {
                notes.push(format!("m {m}, t {t}, y {y}: series not used"));
            }
            let pj = walker_marginal_from_joint(t, y, delta, cfg)?.value;
            worst_p = worst_p.max((p.value - pj).abs());
        }
    }
    // Finite-difference checks of the Laplace-domain equations.
    let mut worst_fd = 0.0f64;
    for _ in 0..10 {
        let s: f64 = rng.random_range(0.2..5.0);
        let b: f64 = rng.random_range(0.2..2.0);
        let delta: f64 = rng.random_range(0.0..6.0);
        let f = |y: f64, bb: f64| laplace_joint(s, y, bb, delta);
        let y = b * rng.random_range(0.1..0.9);
        let h = 1e-4;
        let (f0, fp, fm) = (f(y, b)?, f(y + h, b)?, f(y - h, b)?);
        let bulk = s * f0 - 0.5 * (fp - 2.0 * f0 + fm) / (h * h);
        worst_fd = worst_fd.max((bulk / (s * f0)).abs());
        let h = 1e-5;
        let dy = (3.0 * f(b, b)? - 4.0 * f(b - h, b)? + f(b - 2.0 * h, b)?) / (2.0 * h);
        let db = (-3.0 * f(b, b)? + 4.0 * f(b, b + h)? - f(b, b + 2.0 * h)?) / (2.0 * h);
        let oblique = (1.0 + delta / 4.0) * dy + 0.5 * db;
        worst_fd = worst_fd.max((oblique / ((1.0 + delta / 4.0) * dy)).abs());
        let dy0 = (-3.0 * f(0.0, b)? + 4.0 * f(h, b)? - f(2.0 * h, b)?) / (2.0 * h);
        worst_fd = worst_fd.max((dy0 / (f(0.0, b)? * (2.0 * s).sqrt())).abs());
    }
    Ok(Outcome {
        passed: worst_q <= 1e-8 && worst_p <= 1e-8 && worst_fd <= 1e-6 && notes.is_empty(),
        measured: format!(
            "max |Q - inverted| = {worst_q:.1e}, max |P - inverted| = {worst_p:.1e}, max relative PDE residual = {worst_fd:.1e}"
        ),
        notes,
    })
}

fn a6(cfg: &NumericConfig) -> Result<Outcome> {
    let e1 = walker_mean(1.0, 1.0, cfg)?.value;
    let e2 = walker_mean(1.0, 2.0, cfg)?.value;
    let s1 = walker_second_moment(1.0, 1.0, cfg)?.value;
    let s2 = walker_second_moment(1.0, 2.0, cfg)?.value;
    let l1 = walker_moment_laplace(1, 1.0, 1.0, cfg)?.value;
    let l2 = walker_moment_laplace(1, 1.0, 2.0, cfg)?.value;
    let ls1 = walker_moment_laplace(2, 1.0, 1.0, cfg)?.value;
    let ls2 = walker_moment_laplace(2, 1.0, 2.0, cfg)?.value;
    let closed = 5.0 / 119.0 * (68.0 - 21.0 * PI);
    let checks = [
        (e1 - 0.171227).abs() <= 1e-5,
        (e2 - 0.12386).abs() <= 1e-5,
        (s1 - 0.252102).abs() <= 1e-5,
        (s2 - ls2).abs() <= 1e-8,
    ];
    let verdict = if (s2 - 0.0703665).abs() <= 1e-6 {
        "0.0703665 confirmed"
    } else if (s2 - closed).abs() <= 1e-6 {
        "(5/119)(68-21 pi) confirmed"
    } else {
        "neither 0.0703665 nor (5/119)(68-21 pi) = 0.0851495 is confirmed"
    };
    Ok(Outcome {
        passed: checks.iter().all(|&c| c),
        measured: format!(
            "E1(y) = {e1:.6} (target 0.171227), E2(y) = {e2:.6} (target 0.12386), E1(y^2) = {s1:.6} (target 0.252102), E2(y^2) = {s2:.10} vs Laplace oracle {ls2:.10}; {verdict}"
        ),
        notes: vec![
            format!(
                "an independent route through the Laplace-domain joint density gives E1(y) = {l1:.6}, E2(y) = {l2:.6}, E1(y^2) = {ls1:.6}, E2(y^2) = {ls2:.6}"
            ),
            format!(
                "the stated means are exactly half the computed ones ({:.6}, {:.6}); the stated E1(y^2) = 3(1-G) is (2m+1)/(2m) times 2(1-G) = {:.6}, which is what the double integral with prefactor (2m+1) instead of 2m gives ({:.6})",
                e1 / 0.171227,
                e2 / 0.12386,
                2.0 * (1.0 - CATALAN),
                walker_second_moment_alt_prefactor(1.0, 1.0, cfg)?
            ),
        ],
    })
}

fn a7(cfg: &NumericConfig) -> Result<Outcome> {
    let m = 50.0;
    let eb = max_moment(1, 1.0, m, cfg)?.value;
    let ey2 = walker_second_moment(1.0, m, cfg)?.value;
    let p0 = p_series(1.0, 0.0, 50, cfg)?.value;
    let r = [
        (eb * 101f64.sqrt() - 1.0).abs(),
        (ey2 * 303.0 - 1.0).abs(),
        (p0 / 101f64.sqrt() - 1.0).abs(),
    ];
    Ok(Outcome {
        passed: r[0] <= 0.015 && r[1] <= 0.03 && r[2] <= 0.02,
        measured: format!(
            "E(b) off by {:.2}% (1.5% allowed), E(y^2) by {:.2}% (3%), P(1,0) by {:.2}% (2%)",
            100.0 * r[0],
            100.0 * r[1],
            100.0 * r[2]
        ),
        notes: vec![],
    })
}

fn a8(cfg: &NumericConfig) -> Result<Outcome> {
    let q = Quadrature::new(1e-9).with_max_intervals(400);
    let mut worst = 0.0f64;
    for delta in [0.0, 4.0] {
        let m = (delta / 4.0) as u32;
        for t in [0.5, 1.0, 2.0] {
            let mut err = None;
            let mut keep = |r: Result<f64>| {
                r.unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    f64::NAN
                })
            };
            let iq = q
                .integrate_to_infinity(|b| if b == 0.0 { 0.0 } else { keep(q_auto(t, b, delta, cfg).map(|v| v.value)) }, 0.0)?
                .value;
            let ip = q
                .integrate_to_infinity(|y| keep(p_series(t, y, m, cfg).map(|v| v.value)), 0.0)?
                .value;
            let ij = q
                .integrate_to_infinity(
                    |b| if b == 0.0 { 0.0 } else { keep(max_marginal_from_joint(t, b, delta, cfg).map(|v| v.value)) },
                    0.0,
                )?
                .value;
            if let Some(e) = err {
                return Err(e);
            }
            worst = worst.max((iq - 1.0).abs()).max((ip - 1.0).abs()).max((ij - 1.0).abs());
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-6,
        measured: format!("max |mass - 1| = {worst:.1e} over 18 integrals"),
        notes: vec![],
    })
}

fn a9(cfg: &NumericConfig) -> Result<Outcome> {
    let eps = [0.1, 0.05, 0.025];
    let mut passed = true;
    let mut parts = vec![];
    let mut notes = vec![];
    for delta in [0.0, 4.0] {
        let rows = bridge::convergence_report(1.0, delta, &eps, DeltaMapping::Doubled, cfg)?;
        passed &= bridge::is_non_increasing(&rows, 0.1);
        parts.push(format!(
            "delta {delta}: Q {}; P {}",
            rows.iter().map(|r| format!("{:.4}", r.sup_err_q)).collect::<Vec<_>>().join(" > "),
            rows.iter().map(|r| format!("{:.4}", r.sup_err_p)).collect::<Vec<_>>().join(" > ")
        ));
    }
    let ident = bridge::convergence_report(1.0, 4.0, &eps, DeltaMapping::Identity, cfg)?;
    notes.push(format!(
        "lattice delta is compared with continuum 2 delta; with the continuum parameter equal to the lattice one the walker error stalls: {}",
        ident.iter().map(|r| format!("{:.3}", r.sup_err_p)).collect::<Vec<_>>().join(", ")
    ));
    Ok(Outcome {
        passed,
        measured: parts.join("; "),
        notes,
    })
}

/// `gamma` values used by the bound check.
pub const BOUND_GAMMAS: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0];

fn a10() -> Result<Outcome> {
    let n = 10_000;
    let grid = bridge::a_grid_for(n, &BOUND_GAMMAS);
    let stated = bridge::max_bound_check(n, &grid, BoundBand::AsStated, bridge::FROZEN_SLACK)?;
    let limit = bridge::max_bound_check(n, &grid, BoundBand::LimitConsistent, bridge::FROZEN_SLACK)?;
    let failing = stated.entries.iter().filter(|e| !e.passed).count();
    let at_one = stated.entries.iter().find(|e| e.a == grid[3]).expect("gamma = 1 entry");
    Ok(Outcome {
        passed: stated.passed,
        measured: format!(
            "{failing}/{} grid points outside the band (slack {}/a); at gamma ~ 1, a P = {:.4} vs band [{:.4}, {:.4}]",
            stated.entries.len(),
            bridge::FROZEN_SLACK,
            at_one.value,
            at_one.lower,
            at_one.upper
        ),
        notes: vec![format!(
            "the limit of a P{{A_N = a}} is b Q = 2 sqrt(g) sum (-1)^j (2j+1) e^(-pi g (2j+1)^2/4), twice the stated band; with both edges doubled every point passes: {}",
            limit.passed
        )],
    })
}
