//! Closed-form minimization of `ln MN` — the nine selection cases.
//!
//! Writing `g1(c) = p ln c + c k` (the lower piece) and, in fixed mode,
//! `g2(c) = p ln c + c sigma/2 + const` (the upper piece):
//!
//! * `g1` is monotone when `p` and `k` share a sign; otherwise its only
//!   stationary point is `c = -p/k`.
//! * `g2` has positive slope `sigma/2` at infinity and its stationary point,
//!   when `p < 0`, is `c = -2p/sigma = (n - lambda - 1)/(2 sigma)`.
//!
//! Each case below reduces to comparing those stationary points against the
//! interval ends `c0` and `c1`. Everything is compared in the log domain;
//! none of it requires `MN` to be representable as a float.

use crate::error::Error;
use crate::logspace::{LogScalar, Sign};
use crate::Result;

use super::constants::compute_omega_and_d0;
use super::mn::{eval_branch, MnBranch};
use super::{B0Mode, CChoice, CaseId, Recommendation, SelectionProblem};

/// Dispatch on the problem's `b0` mode.
pub fn select_c(problem: &SelectionProblem) -> Result<Recommendation> {
    match problem.b0_mode() {
        B0Mode::Fixed(_) => select_c_fixed(problem),
        B0Mode::DilationInvariant => select_c_dilation(problem),
    }
}

/// The five fixed-`b0` cases.
pub fn select_c_fixed(problem: &SelectionProblem) -> Result<Recommendation> {
    let B0Mode::Fixed(_) = problem.b0_mode() else {
        return Err(Error::InvalidParameter(
            "select_c_fixed requires a fixed-b0 problem".into(),
        ));
    };
    let derived = problem.derived();
    let (p, k) = (derived.p, derived.k);
    let c0 = derived.c0;
    let c1 = derived.c1.expect("fixed mode always derives c1");

    if p == 0.0 {
        return zero_exponent(problem, c0);
    }

    let rec = if p > 0.0 {
        match k.sign() {
            // g1 strictly increasing on [c0, c1), g2 increasing after: floor wins.
            Sign::Positive | Sign::Zero => finish(
                problem,
                CaseId::Fixed1,
                CChoice::Finite(c0),
                "p > 0, k >= 0: ln MN increasing on [c0, inf); minimum at the floor c0".into(),
                None,
            ),
            Sign::Negative => {
                // g1 rises to the stationary point -p/k = p/|k|, then falls
                // toward the seam; g2 takes over increasing. Minimum is at an
                // end of [c0, c1].
                let c_star = LogScalar::from_ln(p.ln() - k.log_abs())?;
                if !(c_star < c1) {
                    finish(
                        problem,
                        CaseId::Fixed2,
                        CChoice::Finite(c0),
                        "p > 0, k < 0: stationary point at or beyond c1, g1 increasing on the whole range; c0".into(),
                        None,
                    )
                } else if !(c0 < c_star) {
                    finish(
                        problem,
                        CaseId::Fixed2,
                        CChoice::Finite(c1),
                        "p > 0, k < 0: stationary point at or below c0, g1 decreasing on the whole range; c1".into(),
                        None,
                    )
                } else {
                    let at0 = eval_branch(problem, &c0, MnBranch::Lower);
                    let at1 = eval_branch(problem, &c1, MnBranch::Upper);
                    if at1 < at0 {
                        finish(
                            problem,
                            CaseId::Fixed2,
                            CChoice::Finite(c1),
                            "p > 0, k < 0: interior maximum; ln MN(c1) < ln MN(c0)".into(),
                            None,
                        )
                    } else {
                        let mut rec = finish(
                            problem,
                            CaseId::Fixed2,
                            CChoice::Finite(c0),
                            if at0 == at1 {
                                "p > 0, k < 0: interior maximum; endpoints tie, returning the smaller c".into()
                            } else {
                                "p > 0, k < 0: interior maximum; ln MN(c0) < ln MN(c1)".into()
                            },
                            None,
                        )?;
                        if at0 == at1 {
                            rec.tie_candidates = Some([c0, c1]);
                        }
                        return Ok(rec);
                    }
                }
            }
        }
    } else {
        // p < 0.
        let g2_stationary = LogScalar::from_ln((-2.0 * p).ln() - problem.sigma().ln())?;
        match k.sign() {
            Sign::Zero => {
                // g1 strictly decreasing; continue into g2 and stop at its
                // minimum on [c1, inf).
                let c = g2_stationary.max(&c1);
                finish(
                    problem,
                    CaseId::Fixed3,
                    CChoice::Finite(c),
                    format!(
                        "p < 0, k = 0: g1 decreasing; g2 minimized at {}",
                        if c1 < g2_stationary { "its stationary point (n-lambda-1)/(2 sigma)" } else { "the seam c1" }
                    ),
                    None,
                )
            }
            Sign::Positive => {
                // g1 dips at -p/k; clamp into [c0, c1]. Candidate two is the
                // g2 minimum. Compare and keep the smaller (ties -> smaller c).
                let g1_stationary = LogScalar::from_ln((-p).ln() - k.log_abs())?;
                let (c_star, pos) = if !(c0 < g1_stationary) {
                    (c0, "clamped up to c0")
                } else if !(g1_stationary < c1) {
                    (c1, "clamped down to c1")
                } else {
                    (g1_stationary, "interior")
                };
                let c_star_star = g2_stationary.max(&c1);
                let v1 = super::mn::log_mn_extended(problem, &c_star)?;
                let v2 = super::mn::log_mn_extended(problem, &c_star_star)?;
                let (choice, which) = if v2 < v1 {
                    (c_star_star, "g2 candidate wins")
                } else if v1 < v2 {
                    (c_star, "g1 candidate wins")
                } else {
                    (c_star.min(&c_star_star), "candidates tie; smaller c")
                };
                let mut rec = finish(
                    problem,
                    CaseId::Fixed4,
                    CChoice::Finite(choice),
                    format!("p < 0, k > 0: g1 stationary point {pos}; {which}"),
                    None,
                )?;
                if v1 == v2 && c_star != c_star_star {
                    rec.tie_candidates = Some([c_star.min(&c_star_star), c_star.max(&c_star_star)]);
                }
                return Ok(rec);
            }
            Sign::Negative => {
                // g1 strictly decreasing everywhere; same endgame as k = 0.
                let c = g2_stationary.max(&c1);
                finish(
                    problem,
                    CaseId::Fixed5,
                    CChoice::Finite(c),
                    format!(
                        "p < 0, k < 0: g1 decreasing; g2 minimized at {}",
                        if c1 < g2_stationary { "its stationary point (n-lambda-1)/(2 sigma)" } else { "the seam c1" }
                    ),
                    None,
                )
            }
        }
    };
    rec
}

/// The four dilation-invariant cases. `ln MN = g1` on all of `[c0, inf)`;
/// finite choices back-solve the `b0` they imply.
pub fn select_c_dilation(problem: &SelectionProblem) -> Result<Recommendation> {
    let B0Mode::DilationInvariant = problem.b0_mode() else {
        return Err(Error::InvalidParameter(
            "select_c_dilation requires a dilation-invariant problem".into(),
        ));
    };
    let derived = problem.derived();
    let (p, k) = (derived.p, derived.k);
    let c0 = derived.c0;

    if p == 0.0 {
        return zero_exponent(problem, c0);
    }

    if p > 0.0 {
        match k.sign() {
            Sign::Positive | Sign::Zero => finish(
                problem,
                CaseId::Dilation1,
                CChoice::Finite(c0),
                "p > 0, k >= 0: ln MN increasing; minimum at the floor c0".into(),
                None,
            ),
            Sign::Negative => finish(
                problem,
                CaseId::Dilation2,
                CChoice::UnboundedPreferLarge,
                "p > 0, k < 0: ln MN falls without bound beyond the stationary point; prefer large c".into(),
                None,
            ),
        }
    } else {
        match k.sign() {
            Sign::Positive => {
                let stationary = LogScalar::from_ln((-p).ln() - k.log_abs())?;
                if c0 < stationary {
                    finish(
                        problem,
                        CaseId::Dilation3,
                        CChoice::Finite(stationary),
                        "p < 0, k > 0: interior minimum at -p/k".into(),
                        None,
                    )
                } else {
                    finish(
                        problem,
                        CaseId::Dilation3,
                        CChoice::Finite(c0),
                        "p < 0, k > 0: stationary point below the floor; c0".into(),
                        None,
                    )
                }
            }
            Sign::Zero | Sign::Negative => finish(
                problem,
                CaseId::Dilation4,
                CChoice::UnboundedPreferLarge,
                "p < 0, k <= 0: ln MN strictly decreasing; prefer large c".into(),
                None,
            ),
        }
    }
}

/// Degenerate `p = 0` handling, shared by both modes: increasing (`k > 0`)
/// -> floor, decreasing (`k < 0`) -> unbounded, constant (`k = 0`) -> the
/// floor as the canonical representative.
fn zero_exponent(problem: &SelectionProblem, c0: LogScalar) -> Result<Recommendation> {
    let k = problem.derived().k;
    let (choice, detail) = match k.sign() {
        Sign::Positive => (CChoice::Finite(c0), "p = 0, k > 0: increasing; floor c0"),
        Sign::Negative => {
            (CChoice::UnboundedPreferLarge, "p = 0, k < 0: decreasing; prefer large c")
        }
        Sign::Zero => (CChoice::Finite(c0), "p = 0, k = 0: ln MN constant; c0 is the canonical choice"),
    };
    finish(problem, CaseId::ZeroExponent, choice, detail.into(), None)
}

/// Assemble the audit bundle around a decided choice.
fn finish(
    problem: &SelectionProblem,
    case_id: CaseId,
    choice: CChoice,
    detail: String,
    tie_candidates: Option<[LogScalar; 2]>,
) -> Result<Recommendation> {
    let (log_mn_at_choice, omega_d0_at_choice, b0_back_solved) = match &choice {
        CChoice::Finite(c) => {
            let mn = super::mn::log_mn_extended(problem, c)?;
            let od = compute_omega_and_d0(problem.ctx(), c, problem.b0_mode())?;
            let b0 = match problem.b0_mode() {
                B0Mode::DilationInvariant => {
                    let ctx = problem.ctx();
                    Some(LogScalar::from_ln(
                        c.ln()
                            - 3f64.ln()
                            - ctx.rho_delta.rho.ln()
                            - 0.5 * (ctx.n() as f64).ln()
                            - ctx.big_exp,
                    )?)
                }
                B0Mode::Fixed(_) => None,
            };
            (Some(mn), Some(od), b0)
        }
        CChoice::UnboundedPreferLarge => (None, None, None),
    };
    Ok(Recommendation {
        case_id,
        choice,
        log_mn_at_choice,
        b0_back_solved,
        omega_d0_at_choice,
        constants: problem.derived().clone(),
        detail,
        tie_candidates,
    })
}
