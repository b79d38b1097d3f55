//! The shifted surface spline kernel and its radial Fourier transform.
//!
//! For even `n` and even `lambda >= 2`, with `m = 1 + lambda/2`:
//!
//! ```text
//! h(x) = (-1)^m (|x|^2 + c^2)^(lambda/2) * (1/2) ln(|x|^2 + c^2)
//! ```
//!
//! The shift `c > 0` removes the singularity the classical surface spline has
//! at the origin: as a function of `r2 = |x|^2`, `h` is analytic on
//! `[0, inf)`. Its distributional Fourier transform is positive and radial:
//!
//! ```text
//! h^(xi) = l(lambda, n) |xi|^(-lambda - n) (c|xi|)^nu K_nu(c|xi|),   nu = (n + lambda)/2,
//! ```
//!
//! with `K_nu` the modified Bessel function from [`bessel`].

mod bessel;
mod dd;

pub use bessel::bessel_k;

use crate::error::Error;
use crate::theory::{KernelParams, TheoryContext};
use crate::Result;

/// Evaluate the kernel as a function of the *squared* radius `r2 = |x|^2`.
pub fn eval_h(r2: f64, params: &KernelParams) -> Result<f64> {
    if !(r2 >= 0.0) {
        return Err(Error::Domain(format!(
            "eval_h requires a nonnegative squared radius, got {r2}"
        )));
    }
    let t = r2 + params.c * params.c;
    let sign = if params.m() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * t.powi((params.lambda / 2) as i32) * 0.5 * t.ln())
}

/// Kernel value at the origin, `(-1)^m c^lambda ln c`.
pub fn eval_h_origin(params: &KernelParams) -> f64 {
    eval_h(0.0, params).expect("r2 = 0 is always in domain")
}

/// Evaluate the kernel at the displacement `x - y` of two points.
pub fn eval_h_diff(x: &[f64], y: &[f64], params: &KernelParams) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "point dimensions differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    eval_h(r2, params)
}

/// Radial Fourier transform of the kernel at frequency radius `xi > 0`.
///
/// Strictly positive for all `xi > 0` — the property that makes the native
/// space machinery work at all.
pub fn eval_h_fourier(xi: f64, params: &KernelParams, ctx: &TheoryContext) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!(
            "eval_h_fourier requires xi > 0, got {xi}"
        )));
    }
    let nu = (params.n as u32 + params.lambda) / 2;
    let t = params.c * xi;
    let k = bessel_k(nu, t)?;
    Ok(ctx.l_const.value() * xi.powi(-(params.lambda as i32 + params.n as i32)) * t.powi(nu as i32) * k)
}
