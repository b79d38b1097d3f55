//! Minimal double-double arithmetic (~31 significant digits).
//!
//! The ascending series for `K_0`/`K_1` suffers cancellation that grows like
//! `e^(2t)`: at `t = 13` plain `f64` loses ~11 digits more than the 10-digit
//! accuracy contract allows. The handful of operations here (Dekker/Knuth
//! error-free transforms plus a small `exp`/`ln`) restore the needed headroom;
//! nothing outside the Bessel series uses this module.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// `ln 2` to double-double precision.
pub(crate) const LN2: Dd = Dd { hi: 0.693_147_180_559_945_3, lo: 2.319_046_813_846_299_6e-17 };

/// Euler–Mascheroni constant to double-double precision.
pub(crate) const EULER: Dd = Dd { hi: 0.577_215_664_901_532_9, lo: -4.942_915_152_430_645e-18 };

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from_f64(b))
    }

    pub fn recip(self) -> Dd {
        Dd::from_f64(1.0).div(self)
    }

    /// `e^self` via range reduction `self = n ln2 + r` and a Taylor series on
    /// `|r| <= ln2/2`. Valid for |self| up to a few hundred.
    pub fn exp(self) -> Dd {
        let n = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(n));
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for k in 1..40 {
            term = term.mul(r).div_f64(k as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        let scale = (n as i32).into();
        Dd { hi: libm_ldexp(sum.hi, scale), lo: libm_ldexp(sum.lo, scale) }
    }

    /// Natural log via one Newton step from the `f64` seed:
    /// `x1 = x0 + a e^(-x0) - 1` squares the seed's accuracy.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "dd ln of non-positive value");
        let x0 = self.hi.ln();
        let e = Dd::from_f64(-x0).exp();
        let t = self.mul(e).sub(Dd::from_f64(1.0));
        // ln(1+t) ≈ t - t^2/2 (t is ~1e-16, so the quadratic term sits at the
        // noise floor but costs nothing).
        let corr = t.sub(t.mul(t).div_f64(2.0));
        Dd::from_f64(x0).add(corr)
    }
}

/// `x * 2^n` by exponent manipulation (both parts scaled exactly).
fn libm_ldexp(x: f64, n: i32) -> f64 {
    // Our exponents are tiny (|n| < 40); powi is exact for powers of two here.
    x * 2f64.powi(n)
}
