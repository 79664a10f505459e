//! Smooth integer encoding by integral balance.
//!
//! An integer `N` is carried by the counter function
//! `f_N(t) = Σ_{n=1}^{N} a_n · exp(−(t−n)² / (2δ²))`, a row of Gaussian bumps
//! whose coefficients alternate in sign and decay. Because the coefficients
//! sum to zero, the total integral `I(N) = δ√(2π) · S(N)` shrinks towards zero
//! while oscillating in sign, and an integer can be read back from an
//! observed integral by threshold search, table lookup, spline inversion or
//! the closed-form local inverse of the piecewise-linear extension.
//!
//! Modules, bottom-up:
//!
//! * [`coefficients`]: coefficient families `a_n`, partial sums, tail bounds.
//! * [`bumps`]: Gaussian bumps and the transition functions used by the
//!   smooth extension.
//! * [`encoder`]: pointwise and gridded evaluation of `f_N(t)`.
//! * [`integral_map`]: closed-form and quadrature `I(N)`, integral tables.
//! * [`interp`]: natural cubic splines and a bracketed root finder.
//! * [`recovery`]: every inversion procedure plus stability helpers.
//! * [`multidim`]: separable d-dimensional encoding and tuple recovery.

pub mod bumps;
pub mod coefficients;
pub mod encoder;
mod error;
pub mod integral_map;
pub mod interp;
pub mod multidim;
pub mod recovery;

pub use bumps::{Bump, TransitionFunction};
pub use coefficients::{CoefficientFamily, PartialSum};
pub use encoder::{EncoderConfig, Mode};
pub use error::{Error, Result};
pub use integral_map::IntegralTable;
pub use interp::CubicSpline;
pub use multidim::{MultiEncoderConfig, MultiIndex};
pub use recovery::{Method, RecoveryResult};

/// `√(2π)`, the integral of a unit-amplitude, unit-width Gaussian bump.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Default bump width.
pub const DEFAULT_DELTA: f64 = 0.2;

/// Default sigmoid sharpness for the smooth mode.
pub const DEFAULT_SHARPNESS: f64 = 10.0;

/// Default slope threshold for the local-inverse stability check.
pub const DEFAULT_STABILITY_EPSILON: f64 = 1e-6;
