//! Shifted surface spline interpolation with principled shape-parameter selection.
//!
//! The kernel family handled here is, for even dimension `n` and even order
//! parameter `lambda >= 2`,
//!
//! ```text
//! h(x) = (-1)^m (|x|^2 + c^2)^(lambda/2) * (1/2) ln(|x|^2 + c^2),   m = 1 + lambda/2,
//! ```
//!
//! interpolated together with a polynomial tail of degree `m - 1` and the usual
//! moment side conditions. The crate provides:
//!
//! * [`theory`] — the combinatorial constants entering the error analysis
//!   (the `gamma_n` recursion, the `(rho, delta0)` pair, Fourier-transform and
//!   norming constants, unit-ball volumes);
//! * [`kernel`] — evaluation of `h`, its radial Fourier transform, and the
//!   modified Bessel function `K_nu` it depends on;
//! * [`interp`] — scattered-data interpolation: saddle-system assembly and
//!   solve, evaluation, fill-distance estimation;
//! * [`select`] — the shape-parameter criterion: the multiplier `MN(c)`, the
//!   thresholds `c0` and `c1`, the nine selection cases for fixed and
//!   dilation-invariant `b0`, plus the explicit error bounds;
//! * [`harness`] — band-limited (sinc-product) test functions with closed-form
//!   `L2` norms and an experiment runner comparing empirical errors against
//!   the theoretical bound;
//! * [`logspace`] — log-scale positive/signed scalars used throughout, since
//!   the theory constants contain factors like `e^(2 n gamma_n)` that overflow
//!   any fixed-precision float for `n >= 4`.

pub mod error;
pub mod harness;
pub mod interp;
pub mod kernel;
pub mod logspace;
pub mod select;
pub mod theory;

pub use error::Error;
pub use logspace::{LogScalar, SignedLog};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
