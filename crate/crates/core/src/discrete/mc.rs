use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::params::ReinforcementParam;
use crate::{OrwError, Result};

/// Random source that spends one bit on a fair step and a 53-bit uniform
/// otherwise.
pub struct BitSource<R> {
    rng: R,
    bits: u64,
    left: u32,
}

impl<R: RngCore> BitSource<R> {
    pub fn new(rng: R) -> Self {
        BitSource {
            rng,
            bits: 0,
            left: 0,
        }
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 64;
        }
        let b = self.bits & 1 == 1;
        self.bits >>= 1;
        self.left -= 1;
        b
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p`.
    #[inline]
    pub fn up(&mut self, p: f64) -> bool {
        if p == 0.5 {
            self.bit()
        } else {
            self.uniform() < p
        }
    }
}

/// One walk of `n_steps` steps tracked through `(x, a)` only. Returns the
/// final `(x, a)`.
pub fn walk_compressed<R: RngCore>(n_steps: usize, p_up_at_max: f64, src: &mut BitSource<R>) -> (usize, usize) {
    let (mut x, mut a) = (1usize, 1usize);
    for _ in 1..n_steps {
        if x == 0 {
            x = 1;
        } else if x < a {
            if src.bit() {
                x += 1;
            } else {
                x -= 1;
            }
        } else if src.up(p_up_at_max) {
            x += 1;
            a += 1;
        } else {
            x -= 1;
        }
    }
    (x, a)
}

/// The same walk driven by an explicit weight for every edge. Slow; kept as
/// an oracle for [`walk_compressed`]. Consumes the random source in the same
/// pattern, so the two agree path by path on a shared stream.
pub fn walk_edge_map<R: RngCore>(n_steps: usize, delta: f64, src: &mut BitSource<R>) -> (usize, usize) {
    let reinforced = 1.0 + delta;
    // weights[i] is the edge between i and i + 1.
    let mut weights = vec![reinforced];
    let (mut x, mut a) = (1usize, 1usize);
    for _ in 1..n_steps {
        if x == 0 {
            weights[0] = reinforced;
            x = 1;
            continue;
        }
        if weights.len() <= x {
            weights.push(1.0);
        }
        let (wl, wr) = (weights[x - 1], weights[x]);
        if src.up(wr / (wl + wr)) {
            weights[x] = reinforced;
            x += 1;
        } else {
            weights[x - 1] = reinforced;
            x -= 1;
        }
        a = a.max(x);
    }
    (x, a)
}

/// Seeding and batching of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub batch_size: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0x5eed,
            batch_size: 65_536,
        }
    }
}

/// Counts of the final `(x, a)` over simulated walks.
#[derive(Debug, Clone, PartialEq)]
pub struct McHistogram {
    pub n_steps: usize,
    pub param: ReinforcementParam,
    pub n_walks: u64,
    pub seed: u64,
    pub batch_size: usize,
    pub counts: BTreeMap<(usize, usize), u64>,
}

impl McHistogram {
    pub fn count(&self, x: usize, a: usize) -> u64 {
        self.counts.get(&(x, a)).copied().unwrap_or(0)
    }

    pub fn frequency(&self, x: usize, a: usize) -> f64 {
        self.count(x, a) as f64 / self.n_walks as f64
    }

    /// Binomial standard error of a cell frequency when the true mass is `p`.
    pub fn std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n_walks as f64).sqrt()
    }

    /// Writes `N,delta,x,a,count`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "delta", "x", "a", "count"])?;
        let n = self.n_steps.to_string();
        let delta = crate::fmt_f64(self.param.delta);
        for (&(x, a), c) in &self.counts {
            w.write_record([
                n.as_str(),
                delta.as_str(),
                &x.to_string(),
                &a.to_string(),
                &c.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulates `n_walks` walks. Batch `i` draws from the ChaCha8 stream `i` of
/// `seed`, so the counts do not depend on how batches are scheduled.
pub fn mc_simulate(
    n_steps: usize,
    param: ReinforcementParam,
    n_walks: u64,
    cfg: &McConfig,
) -> Result<McHistogram> {
    if n_walks == 0 {
        return Err(OrwError::domain("n_walks must be at least 1"));
    }
    if n_steps == 0 {
        return Err(OrwError::domain("the walk is defined from N = 1"));
    }
    if cfg.batch_size == 0 {
        return Err(OrwError::domain("batch_size must be at least 1"));
    }
    let batch = cfg.batch_size as u64;
    let n_batches = n_walks.div_ceil(batch);
    let p_up = param.p_up_at_max();
    let merged = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let mut src = BitSource::new(rng);
            let walks = batch.min(n_walks - b * batch);
            let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
            for _ in 0..walks {
                *counts.entry(walk_compressed(n_steps, p_up, &mut src)).or_default() += 1;
            }
            counts
        })
        .reduce(HashMap::new, |mut acc, part| {
            for (k, v) in part {
                *acc.entry(k).or_default() += v;
            }
            acc
        });
    Ok(McHistogram {
        n_steps,
        param,
        n_walks,
        seed: cfg.seed,
        batch_size: cfg.batch_size,
        counts: merged.into_iter().collect(),
    })
}
