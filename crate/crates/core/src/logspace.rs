//! Log-scale scalar types.
//!
//! The selection theory multiplies factors like `e^(2 n gamma_n)` (already
//! `e^5056` at `n = 4`) with factors like the fill distance `d` that must be
//! small enough to cancel them. No fixed-precision float holds either factor,
//! so every quantity that can leave the representable range is carried as its
//! natural logarithm.
//!
//! [`LogScalar`] represents a *nonnegative* real as `e^log_value` (with an
//! explicit zero flag). [`SignedLog`] extends it with a sign, so sums with
//! cancellation — the slope `k`, the log-multiplier `ln MN` — stay exact in
//! the log domain.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::Result;

/// Log-sum-exp of two log-domain values: `ln(e^a + e^b)` without overflow.
fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Log-diff-exp: `ln(e^a - e^b)` for `a >= b`, `NEG_INFINITY` when `a == b`.
fn log_diff_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b);
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    // ln(1 - e^(b-a)) computed through expm1 for accuracy when b ≈ a.
    a + (-(b - a).exp_m1()).ln()
}

/// A nonnegative real number stored as its natural logarithm.
///
/// `LogScalar` survives magnitudes far outside `f64` range: only the *log* has
/// to be representable. Multiplication and powers are exact log-domain
/// arithmetic; addition uses log-sum-exp.
#[derive(Clone, Copy, Debug)]
pub struct LogScalar {
    log_value: f64,
    is_zero: bool,
}

impl LogScalar {
    /// The number zero.
    pub fn zero() -> Self {
        LogScalar { log_value: f64::NEG_INFINITY, is_zero: true }
    }

    /// The number one (`log = 0`).
    pub fn one() -> Self {
        LogScalar { log_value: 0.0, is_zero: false }
    }

    /// Build from a plain nonnegative float. Rejects negatives and NaN.
    pub fn from_value(v: f64) -> Result<Self> {
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log-scale value must be nonnegative, got {v}"
            )));
        }
        if v == 0.0 {
            return Ok(Self::zero());
        }
        Ok(LogScalar { log_value: v.ln(), is_zero: false })
    }

    /// Build from a natural logarithm. `NEG_INFINITY` yields zero; NaN is
    /// rejected.
    pub fn from_ln(log_value: f64) -> Result<Self> {
        if log_value.is_nan() {
            return Err(Error::InvalidParameter("log-scale exponent is NaN".into()));
        }
        if log_value == f64::NEG_INFINITY {
            return Ok(Self::zero());
        }
        Ok(LogScalar { log_value, is_zero: false })
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// Natural log; `NEG_INFINITY` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_value
        }
    }

    /// The plain value. Overflows to `inf` / underflows to `0` outside `f64`
    /// range; the log field stays authoritative.
    pub fn value(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_value.exp()
        }
    }

    /// Whether `value()` reproduces this number without over/underflow.
    pub fn representable(&self) -> bool {
        self.is_zero || (self.log_value.abs() < 708.0)
    }

    pub fn mul(&self, rhs: &LogScalar) -> LogScalar {
        if self.is_zero || rhs.is_zero {
            return Self::zero();
        }
        LogScalar { log_value: self.log_value + rhs.log_value, is_zero: false }
    }

    /// Division. Panics on a zero divisor (callers validate positivity first).
    pub fn div(&self, rhs: &LogScalar) -> LogScalar {
        assert!(!rhs.is_zero, "division of LogScalar by zero");
        if self.is_zero {
            return Self::zero();
        }
        LogScalar { log_value: self.log_value - rhs.log_value, is_zero: false }
    }

    pub fn recip(&self) -> LogScalar {
        assert!(!self.is_zero, "reciprocal of zero LogScalar");
        LogScalar { log_value: -self.log_value, is_zero: false }
    }

    /// Raise to a real power. `0^p = 0` for `p > 0`; `0^0 = 1`; negative
    /// powers of zero panic.
    pub fn powf(&self, p: f64) -> LogScalar {
        if self.is_zero {
            if p > 0.0 {
                return Self::zero();
            }
            if p == 0.0 {
                return Self::one();
            }
            panic!("negative power of zero LogScalar");
        }
        LogScalar { log_value: p * self.log_value, is_zero: false }
    }

    pub fn sqrt(&self) -> LogScalar {
        self.powf(0.5)
    }

    /// Log-sum-exp addition.
    pub fn add(&self, rhs: &LogScalar) -> LogScalar {
        if self.is_zero {
            return *rhs;
        }
        if rhs.is_zero {
            return *self;
        }
        LogScalar { log_value: log_sum_exp(self.log_value, rhs.log_value), is_zero: false }
    }

    pub fn max(&self, rhs: &LogScalar) -> LogScalar {
        if self < rhs {
            *rhs
        } else {
            *self
        }
    }

    pub fn min(&self, rhs: &LogScalar) -> LogScalar {
        if rhs < self {
            *rhs
        } else {
            *self
        }
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero || other.is_zero {
            self.is_zero == other.is_zero
        } else {
            self.log_value == other.log_value
        }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        Some(match (self.is_zero, other.is_zero) {
            (true, true) => Equal,
            (true, false) => Less,
            (false, true) => Greater,
            (false, false) => self.log_value.partial_cmp(&other.log_value)?,
        })
    }
}

/// JSON form: a plain nonnegative number, or `{"log": L}` for magnitudes that
/// have no finite float representation. Serialization always emits the exact
/// `{"log": L}` form (except zero, which is the plain number `0.0`) so that
/// round trips preserve the stored log bit-for-bit.
impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct LogForm {
            log: f64,
        }
        if self.is_zero {
            ser.serialize_f64(0.0)
        } else {
            LogForm { log: self.log_value }.serialize(ser)
        }
    }
}

impl<'de> Deserialize<'de> for LogScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Plain(f64),
            Log { log: f64 },
        }
        match Form::deserialize(de)? {
            Form::Plain(v) => LogScalar::from_value(v).map_err(D::Error::custom),
            Form::Log { log } => LogScalar::from_ln(log).map_err(D::Error::custom),
        }
    }
}

/// Sign of a [`SignedLog`] value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A real number stored as a sign and the log of its absolute value.
///
/// Used wherever log-domain quantities are *summed with cancellation*: the
/// slope `k = sigma/2 + correction` (the correction is negative and can be
/// anywhere from dominant to `e^(-5000)` relative), and `ln MN` itself.
///
/// JSON form: `{"sign": -1 | 0 | 1, "log_abs": L}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "SignedLogForm", into = "SignedLogForm")]
pub struct SignedLog {
    sign: Sign,
    log_abs: f64,
}

#[derive(Serialize, Deserialize)]
struct SignedLogForm {
    sign: i8,
    log_abs: f64,
}

impl From<SignedLog> for SignedLogForm {
    fn from(v: SignedLog) -> Self {
        let sign = match v.sign {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        };
        // NEG_INFINITY is not valid JSON; zero's magnitude is irrelevant.
        let log_abs = if v.is_zero() { 0.0 } else { v.log_abs };
        SignedLogForm { sign, log_abs }
    }
}

impl TryFrom<SignedLogForm> for SignedLog {
    type Error = String;
    fn try_from(f: SignedLogForm) -> std::result::Result<Self, String> {
        if f.log_abs.is_nan() {
            return Err("signed log magnitude is NaN".into());
        }
        Ok(match f.sign {
            0 => SignedLog::zero(),
            s if s > 0 => SignedLog::positive(f.log_abs),
            _ => SignedLog::negative(f.log_abs),
        })
    }
}

impl SignedLog {
    pub fn zero() -> Self {
        SignedLog { sign: Sign::Zero, log_abs: f64::NEG_INFINITY }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if v.is_nan() {
            return Err(Error::InvalidParameter("signed log value is NaN".into()));
        }
        if v == 0.0 {
            return Ok(Self::zero());
        }
        Ok(SignedLog {
            sign: if v > 0.0 { Sign::Positive } else { Sign::Negative },
            log_abs: v.abs().ln(),
        })
    }

    /// Positive number with the given log-magnitude.
    pub fn positive(log_abs: f64) -> Self {
        SignedLog { sign: Sign::Positive, log_abs }
    }

    /// Negative number with the given log-magnitude.
    pub fn negative(log_abs: f64) -> Self {
        SignedLog { sign: Sign::Negative, log_abs }
    }

    pub fn from_logscalar(m: &LogScalar) -> Self {
        if m.is_zero() {
            Self::zero()
        } else {
            SignedLog { sign: Sign::Positive, log_abs: m.ln() }
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Negative
    }

    /// Log of the absolute value (`NEG_INFINITY` when zero).
    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn abs(&self) -> LogScalar {
        if self.is_zero() {
            LogScalar::zero()
        } else {
            LogScalar { log_value: self.log_abs, is_zero: false }
        }
    }

    /// Plain float value, saturating to `±inf` / `±0` outside range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => self.log_abs.exp(),
            Sign::Negative => -self.log_abs.exp(),
        }
    }

    pub fn neg(&self) -> Self {
        SignedLog {
            sign: match self.sign {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
                Sign::Zero => Sign::Zero,
            },
            log_abs: self.log_abs,
        }
    }

    /// Signed addition in the log domain. Exact cancellation (equal magnitude,
    /// opposite sign) yields exact zero.
    pub fn add(&self, rhs: &SignedLog) -> SignedLog {
        match (self.sign, rhs.sign) {
            (Sign::Zero, _) => *rhs,
            (_, Sign::Zero) => *self,
            (a, b) if a == b => SignedLog { sign: a, log_abs: log_sum_exp(self.log_abs, rhs.log_abs) },
            _ => {
                // Opposite signs: the larger magnitude wins.
                let (big, small) = if self.log_abs >= rhs.log_abs { (self, rhs) } else { (rhs, self) };
                let log_abs = log_diff_exp(big.log_abs, small.log_abs);
                if log_abs == f64::NEG_INFINITY {
                    Self::zero()
                } else {
                    SignedLog { sign: big.sign, log_abs }
                }
            }
        }
    }

    pub fn sub(&self, rhs: &SignedLog) -> SignedLog {
        self.add(&rhs.neg())
    }

    /// Multiply by a nonnegative log-scale factor.
    pub fn mul_logscalar(&self, m: &LogScalar) -> SignedLog {
        if self.is_zero() || m.is_zero() {
            return Self::zero();
        }
        SignedLog { sign: self.sign, log_abs: self.log_abs + m.ln() }
    }

    pub fn mul(&self, rhs: &SignedLog) -> SignedLog {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let sign = if self.sign == rhs.sign { Sign::Positive } else { Sign::Negative };
        SignedLog { sign, log_abs: self.log_abs + rhs.log_abs }
    }
}

impl PartialEq for SignedLog {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.is_zero() || self.log_abs == other.log_abs)
    }
}

impl PartialOrd for SignedLog {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        fn rank(s: Sign) -> i8 {
            match s {
                Sign::Negative => -1,
                Sign::Zero => 0,
                Sign::Positive => 1,
            }
        }
        let (ra, rb) = (rank(self.sign), rank(other.sign));
        if ra != rb {
            return ra.partial_cmp(&rb);
        }
        Some(match self.sign {
            Sign::Zero => Equal,
            Sign::Positive => self.log_abs.partial_cmp(&other.log_abs)?,
            // More negative magnitude = smaller number.
            Sign::Negative => other.log_abs.partial_cmp(&self.log_abs)?,
        })
    }
}
