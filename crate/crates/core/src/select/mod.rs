//! Shape-parameter selection.
//!
//! The error bound for interpolating a `sigma`-band-limited function factors
//! as `(data-independent constant) * MN(c) * ||f||_L2`, where everything that
//! depends on the shape parameter `c` is collected in
//!
//! ```text
//! ln MN(c) = p ln c + c k                                   on [c0, c1)   (and everywhere in
//! ln MN(c) = p ln c + c sigma/2 + b0 ln(2/3)/(4 gamma_n d)  on [c1, inf)   dilation-invariant mode)
//! ```
//!
//! with `p = (1 - n + lambda)/4` and
//! `k = sigma/2 + ln(2/3) / (12 rho sqrt(n) e^(2 n gamma_n) gamma_n d)`.
//! The floor `c0` is where the convergence theorem starts to apply; `c1` is
//! where the theorem's constant switches branches (fixed-`b0` mode only).
//!
//! Minimizing `ln MN` over `c >= c0` splits into nine closed-form cases by
//! the signs of `p` and `k` — five in fixed-`b0` mode, four in
//! dilation-invariant mode — plus degenerate `p = 0` extensions that cannot
//! arise for even `(n, lambda)` but are handled for totality. A brute-force
//! grid oracle ([`oracle_minimize_mn`]) cross-checks the closed forms.
//!
//! All `c`-like quantities are [`LogScalar`]s and signed sums are
//! [`SignedLog`]s: the factor `e^(2 n gamma_n)` is `e^48` at `n = 2` but
//! `e^5056` at `n = 4`, so the interesting regimes of the theory live far
//! outside `f64` range.

mod bounds;
mod constants;
mod criteria;
mod mn;
mod oracle;

pub use bounds::{error_bound, seminorm_bound};
pub(crate) use bounds::error_bound_unchecked;
pub use constants::{compute_c0, compute_c1, compute_omega_and_d0, CBranch, OmegaD0};
pub use criteria::{select_c, select_c_dilation, select_c_fixed};
pub use mn::{log_mn, log_mn_extended};
#[doc(hidden)]
pub use mn::log_mn_on_branch_for_tests;
pub use oracle::{oracle_minimize_mn, OracleResult};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::logspace::{LogScalar, SignedLog};
use crate::theory::{KernelParams, TheoryContext};
use crate::Result;

/// How the domain-size parameter `b0` is treated.
///
/// JSON form: `{"fixed": <b0>}` or `"dilation_invariant"`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum B0Mode {
    /// `b0` held fixed; the fill distance must satisfy
    /// `d < b0 / (4 gamma_n (m+1))`.
    Fixed(LogScalar),
    /// `b0` scales with `c` (`b0 = c / (3 rho sqrt(n) e^(2 n gamma_n))`);
    /// no restriction on `d`.
    DilationInvariant,
}

impl B0Mode {
    pub fn is_fixed(&self) -> bool {
        matches!(self, B0Mode::Fixed(_))
    }
}

/// Serialization schema for a selection problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub lambda: u32,
    pub sigma: LogScalar,
    pub d: LogScalar,
    pub b0_mode: B0Mode,
}

/// Constants derived from a selection problem at construction time.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedSelectionConstants {
    /// `p = (1 - n + lambda)/4`; the sign splits the selection cases.
    /// Nonzero for every valid even `(n, lambda)`.
    pub p: f64,
    /// Slope `k = sigma/2 + correction` as an exact signed-log sum.
    pub k: SignedLog,
    /// The (negative) correction term of `k`.
    pub correction: SignedLog,
    /// True when `|correction| < 1e-300`, i.e. the correction has no `f64`
    /// representation. `k` is still the exact signed-log sum — the flag is
    /// informational, for consumers working with plain floats.
    pub correction_underflow: bool,
    /// Floor `c0 = 12 rho sqrt(n) e^(2 n gamma_n) gamma_n (m+1) d`.
    pub c0: LogScalar,
    /// Branch point `c1 = 3 b0 rho sqrt(n) e^(2 n gamma_n)` (fixed mode only).
    pub c1: Option<LogScalar>,
}

/// A shape-parameter selection problem: kernel family `(n, lambda)`, band
/// limit `sigma`, fill distance `d`, and the `b0` handling mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProblemSpec", into = "ProblemSpec")]
pub struct SelectionProblem {
    ctx: TheoryContext,
    sigma: LogScalar,
    d: LogScalar,
    b0_mode: B0Mode,
    derived: DerivedSelectionConstants,
}

impl TryFrom<ProblemSpec> for SelectionProblem {
    type Error = Error;
    fn try_from(spec: ProblemSpec) -> Result<Self> {
        SelectionProblem::new(spec.n, spec.lambda, spec.sigma, spec.d, spec.b0_mode)
    }
}

impl From<SelectionProblem> for ProblemSpec {
    fn from(p: SelectionProblem) -> ProblemSpec {
        ProblemSpec {
            n: p.ctx.n(),
            lambda: p.ctx.lambda(),
            sigma: p.sigma,
            d: p.d,
            b0_mode: p.b0_mode,
        }
    }
}

impl SelectionProblem {
    pub fn new(
        n: usize,
        lambda: u32,
        sigma: LogScalar,
        d: LogScalar,
        b0_mode: B0Mode,
    ) -> Result<Self> {
        // The shape parameter is selected later; the context only needs (n, lambda).
        let ctx = TheoryContext::new(KernelParams::new(n, lambda, 1.0)?)?;
        Self::with_context(ctx, sigma, d, b0_mode)
    }

    pub fn with_context(
        ctx: TheoryContext,
        sigma: LogScalar,
        d: LogScalar,
        b0_mode: B0Mode,
    ) -> Result<Self> {
        if sigma.is_zero() || !sigma.ln().is_finite() {
            return Err(Error::InvalidParameter(
                "band limit sigma must be a positive real (finite log)".into(),
            ));
        }
        if d.is_zero() || !d.ln().is_finite() {
            return Err(Error::InvalidParameter(
                "fill distance d must be a positive real (finite log)".into(),
            ));
        }
        if let B0Mode::Fixed(b0) = &b0_mode {
            if b0.is_zero() || !b0.ln().is_finite() {
                return Err(Error::InvalidParameter(
                    "b0 must be a positive real (finite log)".into(),
                ));
            }
            // Admissibility of the fixed-b0 theory: d < b0 / (4 gamma_n (m+1)).
            let bound_log = b0.ln()
                - 4f64.ln()
                - ctx.ln_gamma_n
                - ((ctx.m() + 1) as f64).ln();
            if !(d.ln() < bound_log) {
                return Err(Error::InvalidParameter(format!(
                    "fixed-b0 mode requires d < b0/(4 gamma_n (m+1)): ln d = {:.6e} but the bound's log is {:.6e}",
                    d.ln(),
                    bound_log
                )));
            }
        }
        let derived = constants::derive(&ctx, &sigma, &d, &b0_mode)?;
        if let Some(c1) = &derived.c1 {
            // Implied by the admissibility check; re-verified because the
            // selection intervals would otherwise be empty.
            if !(derived.c0 < *c1) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate selection range: ln c0 = {:.6e} >= ln c1 = {:.6e}",
                    derived.c0.ln(),
                    c1.ln()
                )));
            }
        }
        Ok(SelectionProblem { ctx, sigma, d, b0_mode, derived })
    }

    pub fn ctx(&self) -> &TheoryContext {
        &self.ctx
    }

    pub fn sigma(&self) -> &LogScalar {
        &self.sigma
    }

    pub fn d(&self) -> &LogScalar {
        &self.d
    }

    pub fn b0_mode(&self) -> &B0Mode {
        &self.b0_mode
    }

    pub fn derived(&self) -> &DerivedSelectionConstants {
        &self.derived
    }
}

/// The selected shape parameter: a concrete value, or "any sufficiently large
/// `c` improves the bound further" when the multiplier has no finite
/// minimizer.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CChoice {
    Finite(LogScalar),
    UnboundedPreferLarge,
}

impl CChoice {
    pub fn finite(&self) -> Option<&LogScalar> {
        match self {
            CChoice::Finite(c) => Some(c),
            CChoice::UnboundedPreferLarge => None,
        }
    }
}

/// Which of the nine closed-form selection cases fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    Fixed1,
    Fixed2,
    Fixed3,
    Fixed4,
    Fixed5,
    Dilation1,
    Dilation2,
    Dilation3,
    Dilation4,
    /// `p = 0` (unreachable for even `(n, lambda)`; handled for totality).
    ZeroExponent,
}

/// Result of the closed-form selection, with every constant needed to audit
/// the decision.
#[derive(Clone, Debug, Serialize)]
pub struct Recommendation {
    pub case_id: CaseId,
    pub choice: CChoice,
    /// `ln MN` at the chosen `c` (absent when unbounded).
    pub log_mn_at_choice: Option<SignedLog>,
    /// Dilation-invariant mode back-solves the `b0` its finite choice implies.
    pub b0_back_solved: Option<LogScalar>,
    /// `omega` and `d0` evaluated at the chosen `c` (absent when unbounded).
    pub omega_d0_at_choice: Option<OmegaD0>,
    pub constants: DerivedSelectionConstants,
    /// Human-readable note on which sub-branch applied (clamping, endpoint
    /// comparisons, ties).
    pub detail: String,
    /// When an endpoint comparison tied, both candidates (the smaller was
    /// returned).
    pub tie_candidates: Option<[LogScalar; 2]>,
}
