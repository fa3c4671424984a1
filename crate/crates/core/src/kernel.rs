//! The operator kernel in log space.
//!
//! For parameters `lambda, a > 0` the kernel density at location `x` is
//!
//! ```text
//! kappa(x, nu) = C(lambda, a) / (a^2 + x^2)^(lambda/2)
//!                * |Gamma(lambda/2 + i lambda nu / (2a))|^2
//!                * exp((lambda nu / a) * arctan(x / a))
//! C(lambda, a) = 2^(lambda-2) lambda a^(lambda-1) / (pi Gamma(lambda))
//! ```
//!
//! which integrates to 1 over `nu` for every `x`. Only its logarithm is ever
//! formed. The log-density is exactly symmetric under
//! `(x, nu) -> (-x, -nu)`: every `x`-dependent piece enters through `x^2` or
//! through the product `nu * arctan(x/a)`.

use crate::error::{Error, Result};
use crate::specfun;
use std::f64::consts::PI;

/// Validated operator parameters plus the `x`-independent normalizer pieces.
#[derive(Debug, Clone, Copy)]
pub struct OperatorParams {
    lambda: f64,
    a: f64,
    // ln( 2^(lambda-2) * lambda * a^(lambda-1) / (pi * Gamma(lambda)) )
    log_norm_const: f64,
}

impl OperatorParams {
    /// Requires finite `lambda > 0` and `a > 0`.
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("a must be finite and > 0, got {a}")));
        }
        let log_norm_const = (lambda - 2.0) * std::f64::consts::LN_2 + lambda.ln()
            + (lambda - 1.0) * a.ln()
            - PI.ln()
            - specfun::ln_gamma_real(lambda)?;
        Ok(Self {
            lambda,
            a,
            log_norm_const,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// An evaluation point of the kernel: location `x`, integration variable `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub nu: f64,
}

impl KernelPoint {
    /// Both coordinates must be finite.
    pub fn new(x: f64, nu: f64) -> Result<Self> {
        if !x.is_finite() || !nu.is_finite() {
            return Err(Error::Domain(format!(
                "kernel point must be finite, got (x={x}, nu={nu})"
            )));
        }
        Ok(Self { x, nu })
    }
}

/// Log of the `nu`-independent factor: `ln C - (lambda/2) ln(a^2 + x^2)`.
pub fn log_normalizer(params: &OperatorParams, x: f64) -> f64 {
    params.log_norm_const - 0.5 * params.lambda * (params.a * params.a + x * x).ln()
}

/// Log-density `ln kappa(x, nu)`.
pub fn log_kernel(params: &OperatorParams, p: KernelPoint) -> f64 {
    let lambda = params.lambda;
    let a = params.a;
    let gamma_part =
        specfun::log_abs_gamma_sq(0.5 * lambda, 0.5 * lambda * p.nu / a).expect("lambda/2 > 0");
    let tilt = (lambda * p.nu / a) * (p.x / a).atan();
    log_normalizer(params, p.x) + gamma_part + tilt
}

/// Exact partial derivative of the log-density in `x`:
/// `lambda (nu - x) / (a^2 + x^2)`.
pub fn log_kernel_dx(params: &OperatorParams, p: KernelPoint) -> f64 {
    params.lambda * (p.nu - p.x) / (params.a * params.a + p.x * p.x)
}

/// Mean and standard deviation of the kernel in `nu`:
/// `(x, sqrt((a^2 + x^2) / lambda))`.
///
/// These seed integration windows; the mean is exact (`T e_1 = e_1`) and the
/// scale is the exact second central moment's square root.
pub fn kernel_location_scale(params: &OperatorParams, x: f64) -> (f64, f64) {
    let var = (params.a * params.a + x * x) / params.lambda;
    (x, var.sqrt())
}
