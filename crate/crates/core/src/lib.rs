//! Once-reinforced random walk on the half-line and its Brownian-motion limit.
//!
//! The crate is organised by object:
//!
//! * [`params`] holds the reinforcement parameter, the similarity variable
//!   `gamma` and the numeric tolerances shared by everything else.
//! * [`discrete`] evolves the exact joint law of (position, running maximum)
//!   and simulates the walk by Monte Carlo.
//! * [`genfunc`] rebuilds the same joint law from its generating functions
//!   with truncated power series, as an independent check of [`discrete`].
//! * [`continuum`] evaluates the diffusion-limit densities: the Laplace-domain
//!   joint density, the maximum marginal `Q(t, b)` and the walker marginal
//!   `P_m(t, y)`, with a numerical inverse Laplace transform as oracle.
//! * [`moments`] computes moments of both marginals.
//! * [`bridge`] checks that rescaled lattice marginals converge to the
//!   continuum densities.
//! * [`verify`] bundles the acceptance checks used by the test suite and the
//!   `orw verify` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod continuum;
pub mod discrete;
mod error;
pub mod genfunc;
pub mod moments;
pub mod params;
pub mod quad;
pub mod scalar;
pub mod special;
pub mod verify;

pub use error::{OrwError, Result};
pub use params::{gamma_of, make_param, GammaPoint, NumericConfig, ReinforcementParam};

/// Formats a float with 17 significant digits, the precision used in every
/// exported table.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
