//! Combinatorial and analytic constants of the error theory.
//!
//! Everything here is a function of the kernel's `(n, lambda)` pair alone:
//! the integer sequence `gamma_n`, the pair `(rho, delta0)` controlling the
//! multiplier bound, the Fourier-transform constant `l(lambda, n)`, the
//! norming constant `C0(m, n)`, and the unit-ball volume `alpha_n`.
//!
//! `gamma_n` grows super-exponentially (`gamma_12` already exceeds `3e12` and
//! the sequence leaves `i64` near `n = 13`), so it is computed in arbitrary
//! precision and only projected to floats where a formula consumes it.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::Error;
use crate::logspace::LogScalar;
use crate::Result;

/// Kernel parameters: dimension `n`, order parameter `lambda`, shape
/// parameter `c`. Both `n` and `lambda` must be even (the kernel family and
/// its whole error theory are stated for the even case) and `c > 0`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    pub n: usize,
    pub lambda: u32,
    pub c: f64,
}

impl KernelParams {
    pub fn new(n: usize, lambda: u32, c: f64) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "dimension n must be a positive even integer, got {n}"
            )));
        }
        if lambda == 0 || lambda % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "order parameter lambda must be a positive even integer, got {lambda}"
            )));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shape parameter c must be a positive finite real, got {c}"
            )));
        }
        Ok(KernelParams { n, lambda, c })
    }

    /// `m = 1 + lambda/2`, the order of the conditional positive definiteness
    /// and one more than the degree of the appended polynomial.
    pub fn m(&self) -> u32 {
        1 + self.lambda / 2
    }
}

/// `gamma_n`: `gamma_1 = 2`, `gamma_n = 2n (1 + gamma_(n-1))`.
pub fn gamma(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "gamma_n is defined for n >= 1".into(),
        ));
    }
    let mut g = BigUint::from(2u32);
    for j in 2..=n {
        g = BigUint::from(2 * j) * (BigUint::from(1u32) + g);
    }
    Ok(g)
}

/// Natural log of a positive big integer, accurate to f64 precision even when
/// the value itself exceeds float range.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        x.to_f64().expect("small BigUint converts").ln()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_f64().expect("53-bit BigUint converts");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Which branch of the `(rho, delta0)` definition applies, by the gap
/// `n - lambda` (always even here).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GapCase {
    /// `n - lambda > 3`: stretched `rho > 1`, product of `s` factors over
    /// `rho^(2m+2)`.
    Wide,
    /// `n - lambda <= 1`: `rho = 1`, reciprocal product of `s` factors.
    Narrow,
    /// `1 < n - lambda <= 3` (i.e. exactly 2 here): `rho = 1`, `delta0 = 1`.
    Boundary,
}

/// The `(rho, delta0)` pair for a given `(n, lambda)`.
#[derive(Clone, Debug)]
pub struct RhoDelta {
    /// `rho >= 1` as a float (exact: it is a ratio of small integers).
    pub rho: f64,
    /// The same value as an exact fraction `num/den`.
    pub rho_frac: (u64, u64),
    /// `delta0 > 0`, log-scale (values span many orders across the range).
    pub delta0: LogScalar,
    /// Number of product factors `s` (zero in the boundary case).
    pub s: u32,
    pub case: GapCase,
}

/// Compute `(rho, delta0)` from the three-branch definition:
///
/// * `n - lambda > 3`: `s = ceil((n - lambda - 3)/2)`, `rho = 1 + s/(2m+3)`,
///   `delta0 = (2m+2+s)(2m+1+s)...(2m+3) / rho^(2m+2)` (`s` factors);
/// * `n - lambda <= 1`: `s = -ceil((n - lambda - 3)/2)`, `rho = 1`,
///   `delta0 = 1 / [(2m+2)(2m+1)...(2m-s+3)]` (`s` factors);
/// * otherwise: `rho = 1`, `delta0 = 1`.
pub fn rho_and_delta0(n: usize, lambda: u32) -> Result<RhoDelta> {
    // Reuse the parity validation; c is irrelevant here.
    let params = KernelParams::new(n, lambda, 1.0)?;
    let m = params.m() as i64;
    let gap = n as i64 - lambda as i64;
    if gap > 3 {
        // gap even >= 4, so (gap - 3)/2 rounds up to (gap - 2)/2 >= 1.
        let s = (gap - 2) / 2;
        let den = 2 * m + 3;
        let num = den + s;
        let rho = num as f64 / den as f64;
        let mut log_d = 0.0;
        for j in (2 * m + 3)..=(2 * m + 2 + s) {
            log_d += (j as f64).ln();
        }
        log_d -= (2 * m + 2) as f64 * rho.ln();
        Ok(RhoDelta {
            rho,
            rho_frac: (num as u64, den as u64),
            delta0: LogScalar::from_ln(log_d)?,
            s: s as u32,
            case: GapCase::Wide,
        })
    } else if gap <= 1 {
        // gap even <= 0, so s = ceil((3 - gap)/2) = 1 + (lambda - n)/2 >= 1.
        let s = 1 + (-gap) / 2;
        let mut log_d = 0.0;
        for j in (2 * m - s + 3)..=(2 * m + 2) {
            log_d -= (j as f64).ln();
        }
        Ok(RhoDelta {
            rho: 1.0,
            rho_frac: (1, 1),
            delta0: LogScalar::from_ln(log_d)?,
            s: s as u32,
            case: GapCase::Narrow,
        })
    } else {
        Ok(RhoDelta {
            rho: 1.0,
            rho_frac: (1, 1),
            delta0: LogScalar::one(),
            s: 0,
            case: GapCase::Boundary,
        })
    }
}

/// Sum of `ln j` for `j = 1..=k`, i.e. `ln k!`.
pub(crate) fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

/// Fourier-transform front constant
/// `l(lambda, n) = (2 pi)^(-n/2) * 2^(lambda/2) * (lambda/2)!`.
pub fn l_constant(lambda: u32, n: usize) -> Result<LogScalar> {
    KernelParams::new(n, lambda, 1.0)?;
    let log = -(n as f64 / 2.0) * (2.0 * std::f64::consts::PI).ln()
        + (lambda as f64 / 2.0) * std::f64::consts::LN_2
        + ln_factorial(lambda / 2);
    LogScalar::from_ln(log)
}

/// Native-space norming constant
/// `C0(m, n) = (2 pi)^(-n) * sqrt(m!) / sqrt(l(lambda, n))` with
/// `lambda = 2(m-1)`.
pub fn c0_norm_constant(m: u32, n: usize) -> Result<LogScalar> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "norming constant requires m >= 2 (lambda = 2(m-1) >= 2), got m = {m}"
        )));
    }
    let lambda = 2 * (m - 1);
    let l = l_constant(lambda, n)?;
    let log = -(n as f64) * (2.0 * std::f64::consts::PI).ln() + 0.5 * ln_factorial(m)
        - 0.5 * l.ln();
    LogScalar::from_ln(log)
}

/// Volume `alpha_n` of the unit ball in `R^n`, from the exact closed forms
/// `pi^(n/2)/(n/2)!` (n even) and `2^((n+1)/2) pi^((n-1)/2) / n!!` (n odd).
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "unit-ball volume is defined for n >= 1".into(),
        ));
    }
    let pi = std::f64::consts::PI;
    if n % 2 == 0 {
        let k = n / 2;
        let mut v = 1.0f64;
        for j in 1..=k {
            v *= pi / j as f64;
        }
        Ok(v)
    } else {
        let mut v = 2f64.powi(((n + 1) / 2) as i32) * pi.powi(((n - 1) / 2) as i32);
        let mut j = n as u64;
        while j >= 2 {
            v /= j as f64;
            j -= 2;
        }
        Ok(v)
    }
}

/// All `(n, lambda)`-level constants bundled for reuse.
///
/// `big_exp = 2 n gamma_n` is the exponent of the `e^(2 n gamma_n)` factor
/// that pervades the selection formulas; it is kept as a float exponent (exact
/// as an integer up to `n = 12`, rounded beyond).
#[derive(Clone, Debug)]
pub struct TheoryContext {
    pub params: KernelParams,
    pub gamma_n: BigUint,
    pub ln_gamma_n: f64,
    pub big_exp: f64,
    pub rho_delta: RhoDelta,
    pub l_const: LogScalar,
    pub c0_const: LogScalar,
    pub alpha_n: f64,
}

impl TheoryContext {
    pub fn new(params: KernelParams) -> Result<Self> {
        let gamma_n = gamma(params.n)?;
        let ln_gamma_n = ln_big(&gamma_n);
        let big_exp = 2.0 * params.n as f64 * gamma_n.to_f64().unwrap_or(f64::INFINITY);
        let rho_delta = rho_and_delta0(params.n, params.lambda)?;
        let l_const = l_constant(params.lambda, params.n)?;
        let c0_const = c0_norm_constant(params.m(), params.n)?;
        let alpha_n = unit_ball_volume(params.n)?;
        Ok(TheoryContext {
            params,
            gamma_n,
            ln_gamma_n,
            big_exp,
            rho_delta,
            l_const,
            c0_const,
            alpha_n,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn lambda(&self) -> u32 {
        self.params.lambda
    }

    pub fn m(&self) -> u32 {
        self.params.m()
    }
}
