//! Modified Bessel function of the second kind, `K_nu`, for integer order.
//!
//! Three regimes, all driven from `K_0`/`K_1`:
//!
//! * `t <= 13`: ascending power series. The two series terms individually
//!   reach `~e^t` while `K` itself is `~e^(-t)`, so the summation runs in
//!   double-double arithmetic ([`super::dd`]) to absorb the `e^(2t)`
//!   cancellation; plain `f64` would be ~5 digits short at the crossover.
//! * `t > 13`: the asymptotic expansion `sqrt(pi/(2t)) e^(-t) sum a_k`,
//!   truncated at its smallest term (below `1e-12` relative there).
//! * `nu >= 2`: upward recurrence `K_(nu+1) = K_(nu-1) + (2 nu / t) K_nu`,
//!   which is stable in this direction because the `K_nu` grow with `nu`.
//!
//! Accuracy target: 10 significant digits over `t` in `[1e-6, 500]`,
//! `nu <= 20`. (For large `nu` at tiny `t` the value itself overflows `f64`;
//! the function then returns `inf`.)

use super::dd::{Dd, EULER};
use crate::error::Error;
use crate::Result;

/// Crossover between the ascending series and the asymptotic expansion.
const SERIES_MAX_T: f64 = 13.0;
const MAX_SERIES_TERMS: usize = 80;

/// `K_nu(t)` for integer `nu >= 0`, `t > 0`.
pub fn bessel_k(nu: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "bessel_k requires t > 0, got {t}"
        )));
    }
    let (k0, k1) = if t <= SERIES_MAX_T {
        k0_k1_series(t)
    } else {
        k0_k1_asymptotic(t)
    };
    Ok(match nu {
        0 => k0,
        1 => k1,
        _ => {
            let mut prev = k0;
            let mut cur = k1;
            for j in 1..nu {
                let next = prev + (2.0 * j as f64 / t) * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    })
}

/// Ascending series for `K_0` and `K_1`, summed in double-double.
///
/// With `q = t^2/4` and `H_k` the harmonic numbers:
/// `K_0 = -(ln(t/2) + euler) I_0 + sum_k H_k q^k/(k!)^2`,
/// `K_1 = 1/t + ln(t/2) I_1 - (t/4) sum_k (H_k + H_(k+1) - 2 euler) q^k/(k!(k+1)!)`.
pub(crate) fn k0_k1_series(t: f64) -> (f64, f64) {
    let td = Dd::from_f64(t);
    let q = td.mul(td).div_f64(4.0);
    let ln_half_t = td.div_f64(2.0).ln();

    // K_0 pieces.
    let coef = ln_half_t.add(EULER).neg();
    let mut term = Dd::from_f64(1.0);
    let mut i0 = Dd::from_f64(1.0);
    let mut s0 = Dd::from_f64(0.0);
    let mut h = Dd::from_f64(0.0);
    for k in 1..=MAX_SERIES_TERMS {
        term = term.mul(q).div_f64((k * k) as f64);
        h = h.add(Dd::from_f64(1.0).div_f64(k as f64));
        i0 = i0.add(term);
        s0 = s0.add(term.mul(h));
        if term.hi < 1e-35 * i0.hi {
            break;
        }
    }
    let k0 = coef.mul(i0).add(s0).to_f64();

    // K_1 pieces.
    let two_euler = EULER.mul_f64(2.0);
    let mut term = Dd::from_f64(1.0); // q^k / (k! (k+1)!)
    let mut sum_i = term;
    let mut hk = Dd::from_f64(0.0);
    let mut hk1 = Dd::from_f64(1.0);
    let mut sum_s = hk.add(hk1).sub(two_euler);
    for k in 1..=MAX_SERIES_TERMS {
        term = term.mul(q).div_f64((k * (k + 1)) as f64);
        hk = hk.add(Dd::from_f64(1.0).div_f64(k as f64));
        hk1 = hk1.add(Dd::from_f64(1.0).div_f64((k + 1) as f64));
        sum_i = sum_i.add(term);
        sum_s = sum_s.add(term.mul(hk.add(hk1).sub(two_euler)));
        if term.hi < 1e-35 * sum_i.hi {
            break;
        }
    }
    let i1 = td.div_f64(2.0).mul(sum_i);
    let k1 = td
        .recip()
        .add(ln_half_t.mul(i1))
        .sub(td.div_f64(4.0).mul(sum_s))
        .to_f64();

    (k0, k1)
}

/// Large-argument expansion `K_nu(t) ~ sqrt(pi/(2t)) e^(-t) sum_k a_k`,
/// `a_0 = 1`, `a_k = a_(k-1) (mu - (2k-1)^2) / (8 k t)`, `mu = 4 nu^2`.
/// The (divergent) sum is cut at its smallest term.
pub(crate) fn k0_k1_asymptotic(t: f64) -> (f64, f64) {
    let tail = |mu: f64| -> f64 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..40 {
            let next = term * (mu - (2.0 * k as f64 - 1.0).powi(2)) / (8.0 * k as f64 * t);
            if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
                if next.abs() < term.abs() {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
        }
        sum
    };
    let front = (std::f64::consts::PI / (2.0 * t)).sqrt() * (-t).exp();
    (front * tail(0.0), front * tail(4.0))
}
