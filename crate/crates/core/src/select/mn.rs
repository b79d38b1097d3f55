//! The `c`-dependent multiplier `MN(c)` of the error bound, in log form.

use crate::error::Error;
use crate::logspace::{LogScalar, SignedLog};
use crate::Result;

use super::constants::LN_3_HALVES;
use super::{B0Mode, SelectionProblem};

/// Which piece of the piecewise definition to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MnBranch {
    /// `p ln c + c k` — the `[c0, c1)` piece, and the only piece in
    /// dilation-invariant mode.
    Lower,
    /// `p ln c + c sigma/2 + b0 ln(2/3)/(4 gamma_n d)` — the `[c1, inf)`
    /// piece (fixed mode).
    Upper,
}

/// Evaluate one specific branch formula at `c`, without the domain check.
/// Exposed (hidden) so tests can compare the two formulas at the seam `c1`.
#[doc(hidden)]
pub fn log_mn_on_branch_for_tests(problem: &SelectionProblem, c: &LogScalar, upper: bool) -> SignedLog {
    eval_branch(problem, c, if upper { MnBranch::Upper } else { MnBranch::Lower })
}

pub(crate) fn eval_branch(problem: &SelectionProblem, c: &LogScalar, branch: MnBranch) -> SignedLog {
    let derived = problem.derived();
    let p_term = SignedLog::from_f64(derived.p * c.ln()).expect("p ln c is finite");
    match branch {
        MnBranch::Lower => p_term.add(&derived.k.mul_logscalar(c)),
        MnBranch::Upper => {
            let b0 = match problem.b0_mode() {
                B0Mode::Fixed(b0) => b0,
                B0Mode::DilationInvariant => {
                    unreachable!("upper branch only exists in fixed-b0 mode")
                }
            };
            let half_sigma_c =
                SignedLog::positive(c.ln() + problem.sigma().ln() - std::f64::consts::LN_2);
            let tail = SignedLog::negative(
                b0.ln() + LN_3_HALVES.ln()
                    - 4f64.ln()
                    - problem.ctx().ln_gamma_n
                    - problem.d().ln(),
            );
            p_term.add(&half_sigma_c).add(&tail)
        }
    }
}

/// `ln MN(c)` as an exact signed-log value. Errors for `c` below the
/// theoretical floor `c0` (the bound does not apply there).
pub fn log_mn_extended(problem: &SelectionProblem, c: &LogScalar) -> Result<SignedLog> {
    if c.is_zero() || !c.ln().is_finite() {
        return Err(Error::InvalidParameter(
            "shape parameter c must be a positive real (finite log)".into(),
        ));
    }
    let derived = problem.derived();
    if *c < derived.c0 {
        return Err(Error::Domain(format!(
            "shape parameter below theoretical floor c0: ln c = {:.6e} < ln c0 = {:.6e}",
            c.ln(),
            derived.c0.ln()
        )));
    }
    let branch = match &derived.c1 {
        Some(c1) if !(*c < *c1) => MnBranch::Upper,
        _ => MnBranch::Lower,
    };
    Ok(eval_branch(problem, c, branch))
}

/// `ln MN(c)` as a plain float (saturating beyond `f64` range; use
/// [`log_mn_extended`] for comparisons in extreme regimes).
pub fn log_mn(problem: &SelectionProblem, c: &LogScalar) -> Result<f64> {
    Ok(log_mn_extended(problem, c)?.to_f64())
}
