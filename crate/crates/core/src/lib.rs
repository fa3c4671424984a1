//! A family of exponential-type smoothing operators on the real line.
//!
//! The central object is the positive linear operator `T` parameterized by a
//! concentration `lambda > 0` and a shape `a > 0`, whose kernel is built from
//! the squared modulus of the complex gamma function and an `arctan` tilt.
//! As `a -> 0` the family degenerates to the Post-Widder operator; `a = 1`
//! recovers the Ismail-May operator.
//!
//! Everything numerically delicate is kept in log space: kernel evaluation,
//! window selection, and integration all operate on log-integrands, so the
//! crate stays stable across the full parameter range of interest
//! (`lambda` up to 1e4 and beyond, gamma arguments with huge imaginary part).
//!
//! Modules, bottom up:
//!
//! * [`specfun`]: real log-gamma and `ln |Gamma(x+iy)|^2` plus its large-`y`
//!   asymptotic form.
//! * [`kernel`]: operator parameters, log-kernel, its exact x-derivative, and
//!   the location/scale summary used to seed integration windows.
//! * [`quadrature`]: window expansion and log-domain adaptive Gauss-Legendre
//!   integration.
//! * [`jet`] / [`poly`]: truncated Taylor arithmetic and exact rational
//!   multivariate polynomials (engines for the moment routes).
//! * [`operators`]: applying `T`, its closed-form moment generating function,
//!   x-derivatives of the kernel as polynomial multipliers, and Post-Widder.
//! * [`moments`]: raw/central moments via three independent routes.
//! * [`functions`]: built-in differentiable test functions with growth
//!   certificates.
//! * [`analysis`]: convergence-rate checks and the ladder experiment runner.

pub mod analysis;
pub mod error;
pub mod functions;
pub mod jet;
pub mod kernel;
pub mod moments;
pub mod operators;
pub mod poly;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use functions::SmoothFunction;
pub use kernel::{KernelPoint, OperatorParams};
pub use operators::GrowthBoundedFunction;
pub use quadrature::{QuadConfig, QuadResult};
