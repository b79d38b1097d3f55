//! The derived constants of the selection theory: `c0`, `c1`, `k`, `omega`,
//! `d0`.

use serde::Serialize;

use crate::error::Error;
use crate::logspace::{LogScalar, SignedLog};
use crate::theory::TheoryContext;
use crate::Result;

use super::{B0Mode, DerivedSelectionConstants};

/// `ln(3/2)`, the magnitude of the ubiquitous `ln(2/3)` factor.
pub(crate) const LN_3_HALVES: f64 = 0.405_465_108_108_164_38;

/// Floor of the admissible shape parameters:
/// `c0 = 12 rho sqrt(n) e^(2 n gamma_n) gamma_n (m+1) d`.
pub fn compute_c0(ctx: &TheoryContext, d: &LogScalar) -> Result<LogScalar> {
    if d.is_zero() || !d.ln().is_finite() {
        return Err(Error::InvalidParameter(
            "fill distance d must be a positive real (finite log)".into(),
        ));
    }
    let log = 12f64.ln()
        + ctx.rho_delta.rho.ln()
        + 0.5 * (ctx.n() as f64).ln()
        + ctx.big_exp
        + ctx.ln_gamma_n
        + ((ctx.m() + 1) as f64).ln()
        + d.ln();
    LogScalar::from_ln(log)
}

/// Branch point of the fixed-`b0` theory:
/// `c1 = 3 b0 rho sqrt(n) e^(2 n gamma_n)`.
pub fn compute_c1(ctx: &TheoryContext, b0: &LogScalar) -> Result<LogScalar> {
    if b0.is_zero() || !b0.ln().is_finite() {
        return Err(Error::InvalidParameter(
            "b0 must be a positive real (finite log)".into(),
        ));
    }
    let log = 3f64.ln()
        + b0.ln()
        + ctx.rho_delta.rho.ln()
        + 0.5 * (ctx.n() as f64).ln()
        + ctx.big_exp;
    LogScalar::from_ln(log)
}

/// The slope correction `ln(2/3) / (12 rho sqrt(n) e^(2 n gamma_n) gamma_n d)`
/// (negative), and `k = sigma/2 + correction`.
pub(crate) fn slope_k(
    ctx: &TheoryContext,
    sigma: &LogScalar,
    d: &LogScalar,
) -> (SignedLog, SignedLog) {
    let corr_log_abs = LN_3_HALVES.ln()
        - (12f64.ln()
            + ctx.rho_delta.rho.ln()
            + 0.5 * (ctx.n() as f64).ln()
            + ctx.big_exp
            + ctx.ln_gamma_n
            + d.ln());
    let correction = SignedLog::negative(corr_log_abs);
    let half_sigma = SignedLog::positive(sigma.ln() - std::f64::consts::LN_2);
    (half_sigma.add(&correction), correction)
}

/// Build the full derived-constants bundle for a validated problem.
pub(crate) fn derive(
    ctx: &TheoryContext,
    sigma: &LogScalar,
    d: &LogScalar,
    b0_mode: &B0Mode,
) -> Result<DerivedSelectionConstants> {
    let p = (1.0 - ctx.n() as f64 + ctx.lambda() as f64) / 4.0;
    let (k, correction) = slope_k(ctx, sigma, d);
    let c0 = compute_c0(ctx, d)?;
    let c1 = match b0_mode {
        B0Mode::Fixed(b0) => Some(compute_c1(ctx, b0)?),
        B0Mode::DilationInvariant => None,
    };
    Ok(DerivedSelectionConstants {
        p,
        k,
        correction,
        correction_underflow: correction.log_abs() < 1e-300f64.ln(),
        c0,
        c1,
    })
}

/// Which branch of the convergence constant applies at a given `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CBranch {
    /// `c < c1`: the constant is `2 (rho/c) sqrt(n) e^(2 n gamma_n)`.
    BelowC1,
    /// `c >= c1`: the constant is `2/(3 b0)`.
    AtOrAboveC1,
    /// Dilation-invariant mode: always the `c`-dependent branch.
    DilationInvariant,
}

/// The convergence radius `omega`, admissible fill distance `d0`, and the
/// constant `C` they derive from, at a specific `c`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OmegaD0 {
    /// `ln C` where `C = max{2 (rho/c) sqrt(n) e^(2 n gamma_n), 2/(3 b0)}`
    /// in fixed mode, and always the first branch in dilation mode.
    pub log_big_c: f64,
    /// `ln omega = ln(2/3) / (6 C gamma_n)`, kept signed-log since it can be
    /// an underflowing `-e^(-huge)`.
    pub log_omega: SignedLog,
    /// `d0 = 1 / (6 C gamma_n (m+1))`.
    pub d0: LogScalar,
    pub branch: CBranch,
}

impl OmegaD0 {
    /// `omega` as a plain float (may round to 1 when `|ln omega|` underflows).
    pub fn omega_value(&self) -> f64 {
        self.log_omega.to_f64().exp()
    }
}

/// Compute `(C, omega, d0)` at a given `c`.
///
/// The fixed-mode branch is decided by comparing `c` against `c1` directly
/// (the two formulations are equivalent: `2 (rho/c) sqrt(n) e^(2n gamma_n) >
/// 2/(3 b0)` iff `c < c1`), which keeps this function exactly consistent
/// with the branch choice inside `ln MN`.
pub fn compute_omega_and_d0(
    ctx: &TheoryContext,
    c: &LogScalar,
    b0_mode: &B0Mode,
) -> Result<OmegaD0> {
    if c.is_zero() || !c.ln().is_finite() {
        return Err(Error::InvalidParameter(
            "shape parameter c must be a positive real (finite log)".into(),
        ));
    }
    let below_log = std::f64::consts::LN_2
        + ctx.rho_delta.rho.ln()
        + 0.5 * (ctx.n() as f64).ln()
        + ctx.big_exp
        - c.ln();
    let (log_big_c, branch) = match b0_mode {
        B0Mode::DilationInvariant => (below_log, CBranch::DilationInvariant),
        B0Mode::Fixed(b0) => {
            let c1 = compute_c1(ctx, b0)?;
            if *c < c1 {
                (below_log, CBranch::BelowC1)
            } else {
                (std::f64::consts::LN_2 - 3f64.ln() - b0.ln(), CBranch::AtOrAboveC1)
            }
        }
    };
    let log_omega =
        SignedLog::negative(LN_3_HALVES.ln() - (6f64.ln() + log_big_c + ctx.ln_gamma_n));
    let d0 = LogScalar::from_ln(
        -(6f64.ln() + log_big_c + ctx.ln_gamma_n + ((ctx.m() + 1) as f64).ln()),
    )?;
    Ok(OmegaD0 { log_big_c, log_omega, d0, branch })
}
