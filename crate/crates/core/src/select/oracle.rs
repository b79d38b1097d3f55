//! Brute-force grid minimizer of `ln MN`, used to validate the closed-form
//! selectors. Deterministic: the reduction takes the first (smallest-index,
//! hence smallest-`c`) grid point attaining the minimum.

use crate::error::Error;
use crate::logspace::{LogScalar, SignedLog};
use crate::Result;

use super::mn::log_mn_extended;
use super::SelectionProblem;

/// Outcome of a grid search over `[c0, c_max]`.
#[derive(Clone, Copy, Debug)]
pub struct OracleResult {
    /// Grid point attaining the minimum (first index on ties).
    pub c: LogScalar,
    /// `ln MN` at that point.
    pub log_mn: SignedLog,
    /// Index of the winning point in the log-uniform grid.
    pub index: usize,
    /// True when the winner is the last grid point — the signature of an
    /// objective still decreasing at `c_max`.
    pub at_right_edge: bool,
}

/// Minimize `ln MN` over `grid_points` log-uniformly spaced values of `c`
/// on `[c0, c_max]`.
pub fn oracle_minimize_mn(
    problem: &SelectionProblem,
    c_max: &LogScalar,
    grid_points: usize,
) -> Result<OracleResult> {
    if grid_points < 1000 {
        return Err(Error::InvalidParameter(format!(
            "oracle grid needs at least 1000 points, got {grid_points}"
        )));
    }
    let c0 = problem.derived().c0;
    if !(c0 < *c_max) {
        return Err(Error::InvalidParameter(
            "oracle search range is empty: c_max must exceed c0".into(),
        ));
    }
    let (lo, hi) = (c0.ln(), c_max.ln());
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut best: Option<OracleResult> = None;
    for i in 0..grid_points {
        // Pin the ends exactly; interior points stay strictly inside.
        let log_c = if i == 0 {
            lo
        } else if i == grid_points - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let c = LogScalar::from_ln(log_c)?;
        let value = log_mn_extended(problem, &c)?;
        let better = match &best {
            None => true,
            Some(b) => value < b.log_mn,
        };
        if better {
            best = Some(OracleResult { c, log_mn: value, index: i, at_right_edge: false });
        }
    }
    let mut result = best.expect("grid has at least 1000 points");
    result.at_right_edge = result.index == grid_points - 1;
    Ok(result)
}
