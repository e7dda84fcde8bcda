use std::io::Write;


use crate::params::ReinforcementParam;
use crate::scalar::{Mode, Scalar, StepWeights};
use crate::{OrwError, Result};

/// Limits on the size of a lattice table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpConfig {
    /// Largest number of `(x, a)` cells a table may hold.
    pub max_cells: usize,
    /// Rows with `a > a_cap` are not stored. Their mass is accumulated in
    /// [`JointPmf::truncated_mass`]; rows `a <= a_cap` stay exact because the
    /// maximum never decreases.
    pub a_cap: Option<usize>,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            max_cells: 50_000_000,
            a_cap: None,
        }
    }
}

impl DpConfig {
    pub fn with_a_cap(a_cap: usize) -> Self {
        DpConfig {
            a_cap: Some(a_cap),
            ..Default::default()
        }
    }
}

fn triangle(a_max: usize) -> usize {
    (a_max + 1) * (a_max + 2) / 2
}

#[inline]
fn idx(x: usize, a: usize) -> usize {
    a * (a + 1) / 2 + x
}

/// Joint law `P_N(x, a)` on the triangle `0 <= x <= a`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<T> {
    n_steps: usize,
    param: ReinforcementParam,
    a_max: usize,
    cells: Vec<T>,
    truncated_mass: f64,
}

impl<T: Scalar> JointPmf<T> {
    fn zeros(n_steps: usize, param: ReinforcementParam, a_max: usize) -> Self {
        JointPmf {
            n_steps,
            param,
            a_max,
            cells: vec![T::zero(); triangle(a_max)],
            truncated_mass: 0.0,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn param(&self) -> &ReinforcementParam {
        &self.param
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    /// Largest stored maximum.
    pub fn a_max(&self) -> usize {
        self.a_max
    }

    /// Probability that the maximum exceeded the storage cap.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// `P_N(x, a)`, zero outside the stored triangle.
    pub fn get(&self, x: usize, a: usize) -> T {
        if x <= a && a <= self.a_max {
            self.cells[idx(x, a)].clone()
        } else {
            T::zero()
        }
    }

    pub fn total_mass(&self) -> T {
        self.cells.iter().fold(T::zero(), |s, p| s + p.clone())
    }

    /// Nonzero entries as `(x, a, p)`, ordered by `a` then `x`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        (1..=self.a_max).flat_map(move |a| {
            (0..=a).filter_map(move |x| {
                let p = &self.cells[idx(x, a)];
                (!p.is_zero()).then_some((x, a, p))
            })
        })
    }

    /// Writes `N,delta,x,a,p`, one row per nonzero entry.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "delta", "x", "a", "p"])?;
        let n = self.n_steps.to_string();
        let delta = crate::fmt_f64(self.param.delta);
        for (x, a, p) in self.nonzero() {
            w.write_record([
                n.as_str(),
                delta.as_str(),
                &x.to_string(),
                &a.to_string(),
                &p.to_table_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Converts to floating point.
    pub fn to_f64(&self) -> JointPmf<f64> {
        JointPmf {
            n_steps: self.n_steps,
            param: self.param,
            a_max: self.a_max,
            cells: self.cells.iter().map(Scalar::to_f64).collect(),
            truncated_mass: self.truncated_mass,
        }
    }

    /// Builds a table from explicit entries. Used by coefficient extraction.
    pub(crate) fn from_entries(
        n_steps: usize,
        param: ReinforcementParam,
        a_max: usize,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut pmf = Self::zeros(n_steps, param, a_max);
        for (x, a, p) in entries {
            pmf.cells[idx(x, a)] = p;
        }
        pmf
    }
}

/// The walk after one step: unit mass at `(1, 1)`.
pub fn dp_init<T: Scalar>(param: ReinforcementParam) -> JointPmf<T> {
    let mut pmf = JointPmf::zeros(1, param, 1);
    pmf.cells[idx(1, 1)] = T::one();
    pmf
}

fn cap_for(cfg: &DpConfig, n_steps: usize) -> usize {
    cfg.a_cap.map_or(n_steps, |c| c.clamp(1, n_steps))
}

fn check_budget(cfg: &DpConfig, a_max: usize) -> Result<()> {
    let needed = triangle(a_max);
    if needed > cfg.max_cells {
        return Err(OrwError::Capacity {
            needed,
            budget: cfg.max_cells,
        });
    }
    Ok(())
}

/// Pushes the mass of `src` (at step `n`) one step forward into `dst`.
/// `dst` must be zeroed and have room for rows up to `dst_a_max`.
/// Returns the mass that left the stored rows.
fn push_step<T: Scalar>(
    src: &[T],
    src_a_max: usize,
    n: usize,
    w: &StepWeights<T>,
    dst: &mut [T],
    dst_a_max: usize,
) -> T {
    let mut lost = T::zero();
    for a in 1..=src_a_max {
        let row = idx(0, a);
        // x has the parity of n; skip the other half of the row.
        let mut x = n % 2;
        while x <= a {
            let p = &src[row + x];
            if !p.is_zero() {
                if x == 0 {
                    let c = &mut dst[row + 1];
                    *c = c.clone() + p.clone();
                } else if x < a {
                    let h = p.clone() * w.half.clone();
                    let c = &mut dst[row + x - 1];
                    *c = c.clone() + h.clone();
                    let c = &mut dst[row + x + 1];
                    *c = c.clone() + h;
                } else {
                    let c = &mut dst[row + a - 1];
                    *c = c.clone() + p.clone() * w.down_at_max.clone();
                    let up = p.clone() * w.up_at_max.clone();
                    if a < dst_a_max {
                        let c = &mut dst[idx(a + 1, a + 1)];
                        *c = c.clone() + up;
                    } else {
                        lost = lost + up;
                    }
                }
            }
            x += 2;
        }
    }
    lost
}

/// Advances the joint law by one step.
pub fn dp_step<T: Scalar>(pmf: &JointPmf<T>, cfg: &DpConfig) -> Result<JointPmf<T>> {
    let n_next = pmf.n_steps + 1;
    let a_next = cap_for(cfg, n_next).max(pmf.a_max);
    check_budget(cfg, a_next)?;
    let w = StepWeights::<T>::new(pmf.param.delta);
    let mut next = JointPmf::zeros(n_next, pmf.param, a_next);
    let lost = push_step(&pmf.cells, pmf.a_max, pmf.n_steps, &w, &mut next.cells, a_next);
    next.truncated_mass = pmf.truncated_mass + lost.to_f64();
    Ok(next)
}

/// Joint law after `n_steps` steps.
pub fn dp_evolve<T: Scalar>(
    n_steps: usize,
    param: ReinforcementParam,
    cfg: &DpConfig,
) -> Result<JointPmf<T>> {
    if n_steps == 0 {
        return Err(OrwError::domain("the walk is defined from N = 1"));
    }
    let a_cap = cap_for(cfg, n_steps);
    check_budget(cfg, a_cap)?;
    let w = StepWeights::<T>::new(param.delta);
    let mut cur = vec![T::zero(); triangle(a_cap)];
    let mut nxt = cur.clone();
    cur[idx(1, 1)] = T::one();
    let mut a_cur = 1;
    let mut lost = 0.0;
    for n in 1..n_steps {
        let a_next = (n + 1).min(a_cap);
        let used = triangle(a_next);
        for c in &mut nxt[..used] {
            *c = T::zero();
        }
        lost += push_step(&cur, a_cur, n, &w, &mut nxt, a_next).to_f64();
        std::mem::swap(&mut cur, &mut nxt);
        a_cur = a_next;
    }
    cur.truncate(triangle(a_cur));
    Ok(JointPmf {
        n_steps,
        param,
        a_max: a_cur,
        cells: cur,
        truncated_mass: lost,
    })
}

/// `P{S_N = x}` for `x = 0..=a_max`.
pub fn marginal_position<T: Scalar>(pmf: &JointPmf<T>) -> Vec<T> {
    let mut out = vec![T::zero(); pmf.a_max + 1];
    for (x, _, p) in pmf.nonzero() {
        out[x] = out[x].clone() + p.clone();
    }
    out
}

/// `P{A_N = a}` for `a = 0..=a_max` (entry 0 is always zero).
pub fn marginal_maximum<T: Scalar>(pmf: &JointPmf<T>) -> Vec<T> {
    let mut out = vec![T::zero(); pmf.a_max + 1];
    for (_, a, p) in pmf.nonzero() {
        out[a] = out[a].clone() + p.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_param;
    use num_rational::BigRational;
    use num_traits::One;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn initial_atom() {
        let pmf: JointPmf<Q> = dp_init(make_param(0.0).unwrap());
        assert_eq!(pmf.get(1, 1), Q::one());
        assert_eq!(pmf.total_mass(), Q::one());
        assert_eq!(pmf.nonzero().count(), 1);
    }

    #[test]
    fn second_step_by_hand() {
        for (d, dn) in [(0i64, 1i64), (1, 1), (4, 1), (1, 2)] {
            let delta = d as f64 / dn as f64;
            let p = make_param(delta).unwrap();
            let two = dp_step(&dp_init::<Q>(p), &DpConfig::default()).unwrap();
            // (1+delta)/(2+delta) and 1/(2+delta) with delta = d/dn.
            assert_eq!(two.get(0, 1), q(dn + d, 2 * dn + d));
            assert_eq!(two.get(2, 2), q(dn, 2 * dn + d));
            assert_eq!(two.nonzero().count(), 2);
        }
    }

    #[test]
    fn unreinforced_third_step_position() {
        let pmf: JointPmf<Q> = dp_evolve(3, make_param(0.0).unwrap(), &DpConfig::default()).unwrap();
        let pos = marginal_position(&pmf);
        assert_eq!(pos[1], q(3, 4));
        assert_eq!(pos[3], q(1, 4));
    }

    #[test]
    fn evolve_agrees_with_repeated_step() {
        let p = make_param(2.0).unwrap();
        let cfg = DpConfig::default();
        let mut stepped = dp_init::<Q>(p);
        for _ in 1..15 {
            stepped = dp_step(&stepped, &cfg).unwrap();
        }
        let evolved: JointPmf<Q> = dp_evolve(15, p, &cfg).unwrap();
        assert_eq!(stepped, evolved);
    }

    #[test]
    fn origin_diagonal_is_geometric() {
        let p = make_param(4.0).unwrap();
        let pmf: JointPmf<Q> = dp_evolve(21, p, &DpConfig::default()).unwrap();
        let five_sixths = q(5, 6);
        let expect = (0..10).fold(Q::one(), |acc, _| acc * five_sixths.clone());
        assert_eq!(pmf.get(1, 1), expect);
    }

    #[test]
    fn exact_mass_and_parity() {
        let pmf: JointPmf<Q> = dp_evolve(30, make_param(2.0).unwrap(), &DpConfig::default()).unwrap();
        assert_eq!(pmf.total_mass(), Q::one());
        assert!(pmf.nonzero().all(|(x, a, p)| x % 2 == 0 && x <= a && a <= 30 && !p.is_negative()));
    }

    #[test]
    fn marginals_of_two_steps() {
        let m0 = marginal_maximum(&dp_evolve::<Q>(2, make_param(0.0).unwrap(), &DpConfig::default()).unwrap());
        assert_eq!((m0[1].clone(), m0[2].clone()), (q(1, 2), q(1, 2)));
        let m4 = marginal_maximum(&dp_evolve::<Q>(2, make_param(4.0).unwrap(), &DpConfig::default()).unwrap());
        assert_eq!(m4[2], q(1, 6));
        let m1 = marginal_maximum(&dp_init::<Q>(make_param(0.0).unwrap()));
        assert_eq!(m1[1], Q::one());
    }

    #[test]
    fn capped_rows_are_exact() {
        let p = make_param(1.0).unwrap();
        let full: JointPmf<f64> = dp_evolve(200, p, &DpConfig::default()).unwrap();
        let capped: JointPmf<f64> = dp_evolve(200, p, &DpConfig::with_a_cap(40)).unwrap();
        for a in 1..=40 {
            for x in 0..=a {
                assert_eq!(full.get(x, a), capped.get(x, a));
            }
        }
        let tail: f64 = marginal_maximum(&full)[41..].iter().sum();
        assert!((capped.truncated_mass() - tail).abs() < 1e-14);
        assert!((capped.total_mass() + capped.truncated_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_error() {
        let cfg = DpConfig {
            max_cells: 100,
            a_cap: None,
        };
        let err = dp_evolve::<f64>(50, make_param(0.0).unwrap(), &cfg).unwrap_err();
        assert!(matches!(err, OrwError::Capacity { .. }));
        let small: JointPmf<f64> = dp_init(make_param(0.0).unwrap());
        let mut pmf = small;
        for _ in 0..11 {
            pmf = dp_step(&pmf, &cfg).unwrap();
        }
        assert!(dp_step(&pmf, &cfg).is_err());
    }

    #[test]
    fn csv_export() {
        let pmf: JointPmf<Q> = dp_evolve(2, make_param(4.0).unwrap(), &DpConfig::default()).unwrap();
        let mut buf = Vec::new();
        pmf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "N,delta,x,a,p\n2,4.0000000000000000e0,0,1,5/6\n2,4.0000000000000000e0,2,2,1/6\n"
        );
    }
}
