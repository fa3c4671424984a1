//! Kernel moments by three independent routes.
//!
//! * [`raw_moments_jet`] / [`central_moments_jet`]: truncated Taylor jets
//!   pushed through the closed-form exponential moment at `theta = 0`.
//! * [`central_moment_symbolic`]: exact rational polynomials in
//!   `(x, a^2, 1/lambda)` from the first-order recurrence
//!   `mu_{p+1} = (a^2 + x^2)/lambda * (p mu_{p-1} + d mu_p / dx)`.
//! * [`asymptotic_raw_moment`]: the large-lambda expansion of `(T e_p)(x)`
//!   through `1/lambda^2`.
//!
//! The routes share no arithmetic, so cross-checking them catches mistakes
//! in any one derivation.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::kernel::OperatorParams;
use crate::poly::RatPoly;
use num_rational::BigRational;

/// Jet of `theta -> (T e^{theta nu})(x)` at `theta = 0`.
fn mgf_jet(params: &OperatorParams, x: f64, order: usize) -> Result<Jet> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    let lambda = params.lambda();
    let a = params.a();
    let theta = Jet::variable(0.0, order)?;
    let (sin_w, cos_w) = theta.scale(a / lambda).sin_cos();
    let base = cos_w.sub(&sin_w.scale(x / a));
    // base(0) = 1, so the log and the power are well defined
    base.powf(-lambda)
}

/// Raw moments `(T e_p)(x)` for `p = 0..=max_p`.
pub fn raw_moments_jet(params: &OperatorParams, x: f64, max_p: usize) -> Result<Vec<f64>> {
    let jet = mgf_jet(params, x, max_p)?;
    Ok((0..=max_p).map(|p| jet.derivative(p)).collect())
}

/// Central moments `(T (e_1 - x)^p)(x)` for `p = 0..=max_p`, obtained by
/// tilting the exponential-moment jet with `e^{-theta x}`.
pub fn central_moments_jet(params: &OperatorParams, x: f64, max_p: usize) -> Result<Vec<f64>> {
    let jet = mgf_jet(params, x, max_p)?;
    let tilt = Jet::variable(0.0, max_p)?.scale(-x).exp();
    let centered = jet.mul(&tilt);
    Ok((0..=max_p).map(|p| centered.derivative(p)).collect())
}

/// A central moment as an exact polynomial in `x`, `A = a^2`, `R = 1/lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralMomentPolynomial {
    order: u32,
    // variables: 0 -> x, 1 -> a^2, 2 -> 1/lambda
    poly: RatPoly<3>,
}

impl CentralMomentPolynomial {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &RatPoly<3> {
        &self.poly
    }

    pub fn eval(&self, params: &OperatorParams, x: f64) -> f64 {
        let a = params.a();
        self.poly
            .eval_f64(&[x, a * a, params.lambda().recip()])
    }
}

/// Central moments by the exact recurrence; all intermediate arithmetic is
/// over arbitrary-precision rationals.
pub fn central_moment_symbolic(p: u32) -> CentralMomentPolynomial {
    let x = RatPoly::<3>::var(0);
    let a2 = RatPoly::<3>::var(1);
    let r = RatPoly::<3>::var(2);
    let pre = a2.add(&x.mul(&x)).mul(&r); // (a^2 + x^2) / lambda

    let mut prev = RatPoly::<3>::one(); // mu_0
    let mut cur = RatPoly::<3>::zero(); // mu_1
    if p == 0 {
        return CentralMomentPolynomial {
            order: 0,
            poly: prev,
        };
    }
    for k in 1..p {
        let weighted = prev.scale(&BigRational::from_integer((k as i64).into()));
        let next = pre.mul(&weighted.add(&cur.derivative(0)));
        prev = cur;
        cur = next;
    }
    CentralMomentPolynomial { order: p, poly: cur }
}

/// Large-lambda expansion of the raw moment `(T e_p)(x)` through
/// `1/lambda^2`:
///
/// ```text
/// x^p [1 + p(p-1)/(2 lambda) + p(p-1)(p-2)(3p-1)/(24 lambda^2)]
/// + a^2 x^{p-2} [p(p-1)/(2 lambda) + p(p-1)(p-2)(3p-5)/(12 lambda^2)]
/// + a^4 x^{p-4} p(p-1)(p-2)(p-3)/(8 lambda^2)
/// ```
///
/// Exact for `p <= 3`. Negative powers of `x` only ever appear with zero
/// coefficient; evaluation at `x = 0` with a live negative power is a
/// domain error rather than an infinity.
pub fn asymptotic_raw_moment(p: u32, lambda: f64, a: f64, x: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be finite and > 0, got {lambda}"
        )));
    }
    if !a.is_finite() || a < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "need finite a >= 0 and finite x, got (a={a}, x={x})"
        )));
    }
    let pf = p as f64;
    let fall2 = pf * (pf - 1.0);
    let fall3 = fall2 * (pf - 2.0);
    let fall4 = fall3 * (pf - 3.0);
    let il = lambda.recip();

    let c_top = 1.0 + fall2 / 2.0 * il + fall3 * (3.0 * pf - 1.0) / 24.0 * il * il;
    let c_mid = fall2 / 2.0 * il + fall3 * (3.0 * pf - 5.0) / 12.0 * il * il;
    let c_low = fall4 / 8.0 * il * il;

    let power = |coeff: f64, e: i32| -> Result<f64> {
        if coeff == 0.0 {
            return Ok(0.0);
        }
        if e < 0 && x == 0.0 {
            return Err(Error::Domain(format!(
                "asymptotic moment needs x != 0 for p={p} (negative power of x)"
            )));
        }
        Ok(coeff * x.powi(e))
    };

    let a2 = a * a;
    Ok(power(c_top, p as i32)?
        + a2 * power(c_mid, p as i32 - 2)?
        + a2 * a2 * power(c_low, p as i32 - 4)?)
}
