//! Brownian-limit densities.
//!
//! The Laplace transform in time of the joint density of walker position
//! `y` and maximum `b` is
//! `(2 + delta) cosh(y sqrt(2s)) / cosh(b sqrt(2s))^(2 + delta/2)` on
//! `0 <= y <= b`. The maximum marginal `Q(t, b)` has two theta-type series,
//! one fast for large `gamma = 2 b^2 / (pi t)` and its dual, fast for small
//! `gamma`. The walker marginal `P_m(t, y)` (`delta = 4m`) has an alternating
//! series in `exp(-y^2 (2j + 3 + 2m)^2 / 2t)`. A fixed Talbot inversion of
//! the transforms serves as an independent oracle for all of them.

mod ilt;
mod joint;
mod laplace;
mod pseries;
mod qseries;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use ilt::{ilt, ilt_log, talbot_log, IltValue};
pub use joint::{joint_density, max_marginal_from_joint, walker_marginal_from_joint};
pub use laplace::{laplace_joint, laplace_joint_c, laplace_maximum, LaplaceField};
pub use pseries::{in_monotone_region, p_series, walker_density_at_origin};
pub use qseries::{poisson_terms, q_auto, q_ilt, q_poisson, q_series, PoissonTerm};

use crate::Result;

/// How a density value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DirectSeries,
    PoissonSeries,
    IltOracle,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::DirectSeries => "direct_series",
            Method::PoissonSeries => "poisson_series",
            Method::IltOracle => "ilt_oracle",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// A density value with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Series terms, contour nodes or integrand evaluations.
    pub terms_used: usize,
    /// Bound on the dropped tail for series; size of the node-reduction change
    /// for inversions; quadrature error estimate for integrated oracles.
    pub tail_bound: f64,
    pub method: Method,
    /// The similarity variable used, for values of `Q`.
    pub gamma: Option<f64>,
}

/// One row of an exported density table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub t: f64,
    pub delta: f64,
    pub coord: f64,
    pub value: SeriesValue,
}

/// Writes `t,delta,coord,value,method,terms,tail_bound`.
pub fn write_density_csv<W: Write>(rows: &[DensityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "delta", "coord", "value", "method", "terms", "tail_bound"])?;
    for r in rows {
        w.write_record([
            crate::fmt_f64(r.t),
            crate::fmt_f64(r.delta),
            crate::fmt_f64(r.coord),
            crate::fmt_f64(r.value.value),
            r.value.method.as_str().to_string(),
            r.value.terms_used.to_string(),
            crate::fmt_f64(r.value.tail_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}
