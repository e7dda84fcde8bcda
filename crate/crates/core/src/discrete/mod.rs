//! Exact lattice dynamics of the walk and a Monte Carlo simulator.
//!
//! The state after `N` steps is the pair `(x, a)` of position and running
//! maximum. From `x = 0` the walker moves to 1. Below the maximum both edges
//! carry the same weight and the step is fair. At the maximum the edge behind
//! has weight `1 + delta` and the fresh edge ahead weight 1.

mod mc;
mod pmf;

pub use mc::{mc_simulate, walk_compressed, walk_edge_map, BitSource, McConfig, McHistogram};
pub use pmf::{
    dp_evolve, dp_init, dp_step, marginal_maximum, marginal_position, DpConfig, JointPmf,
};
