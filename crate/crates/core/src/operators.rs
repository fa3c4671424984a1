//! Applying the operator family and its relatives.
//!
//! * [`apply`]: `(T f)(x)` by windowed log-domain quadrature on the signed
//!   split `f = f+ - f-`.
//! * [`mgf_closed_form`]: the exponential-moment identity
//!   `(T e^{theta nu})(x) = (cos(a theta/lambda) - (x/a) sin(a theta/lambda))^{-lambda}`.
//! * [`derivative_kernel`] / [`apply_derivative`]: x-derivatives of the
//!   kernel expressed as exact polynomial multipliers `Q_p` with
//!   `d^p kappa / dx^p = Q_p kappa`, orders 0..=3.
//! * [`apply_post_widder`]: the `a -> 0` member of the family.
//!
//! Integration is admissibility-gated: a function enters the quadrature only
//! if its certified exponential growth rate stays below 90% of the kernel's
//! tilt-adjusted decay rate, so tails are provably summable.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{self, KernelPoint, OperatorParams};
use crate::poly::RatPoly;
use crate::quadrature::{self, QuadConfig};
use crate::specfun;
use num_rational::BigRational;
use std::f64::consts::FRAC_PI_2;

/// A scalar function with a certified growth envelope
/// `|f(nu)| <= scale * exp(rate * |nu|)`.
///
/// Stored as `base(nu) * exp(tilt * nu)`: any purely exponential component
/// rides in `tilt`, where the integrators keep it in log space, and the
/// closure supplies the remaining `base`. A strongly tilted integrand stays
/// representable that way even where `exp(tilt * nu)` alone overflows f64.
/// Plain functions use `tilt = 0` and `base` is the function itself.
///
/// The certificate is what makes unbounded integrands safe: the admissibility
/// check and the integration window both consult it, never the raw closure.
#[derive(Clone)]
pub struct GrowthBoundedFunction {
    base: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    tilt: f64,
    scale: f64,
    rate: f64,
    label: String,
}

impl std::fmt::Debug for GrowthBoundedFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrowthBoundedFunction")
            .field("label", &self.label)
            .field("scale", &self.scale)
            .field("rate", &self.rate)
            .field("tilt", &self.tilt)
            .finish()
    }
}

impl GrowthBoundedFunction {
    /// Certificate constants must be finite with `scale >= 0`, `rate >= 0`.
    pub fn new(
        label: impl Into<String>,
        scale: f64,
        rate: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new_tilted(label, scale, rate, 0.0, eval)
    }

    /// A function of the form `base(nu) * exp(tilt * nu)`. The certificate
    /// covers the product, so a non-decaying `base` needs `|tilt| <= rate`.
    pub fn new_tilted(
        label: impl Into<String>,
        scale: f64,
        rate: f64,
        tilt: f64,
        base: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 || !rate.is_finite() || rate < 0.0 {
            return Err(Error::Domain(format!(
                "growth certificate must be finite and nonnegative, got scale={scale}, rate={rate}"
            )));
        }
        if !tilt.is_finite() {
            return Err(Error::Domain(format!("tilt must be finite, got {tilt}")));
        }
        Ok(Self {
            base: Arc::new(base),
            tilt,
            scale,
            rate,
            label: label.into(),
        })
    }

    pub fn eval(&self, nu: f64) -> f64 {
        if self.tilt == 0.0 {
            return (self.base)(nu);
        }
        (self.base)(nu) * (self.tilt * nu).exp()
    }

    /// The exponential component `tilt` in `base(nu) * exp(tilt * nu)`.
    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `K` in the envelope `K e^{N |nu|}`.
    pub fn growth_scale(&self) -> f64 {
        self.scale
    }

    /// `N` in the envelope `K e^{N |nu|}`.
    pub fn growth_rate(&self) -> f64 {
        self.rate
    }
}

/// Kernel decay rate available to absorb integrand growth at location `x`:
/// `(lambda / a) * (pi/2 - |arctan(x/a)|)`.
pub fn admissible_rate(params: &OperatorParams, x: f64) -> f64 {
    (params.lambda() / params.a()) * (FRAC_PI_2 - (x / params.a()).atan().abs())
}

fn check_admissible(params: &OperatorParams, f: &GrowthBoundedFunction, x: f64) -> Result<()> {
    let bound = 0.9 * admissible_rate(params, x);
    if f.rate >= bound {
        return Err(Error::GrowthTooFast {
            rate: f.rate,
            bound,
            lambda: params.lambda(),
            a: params.a(),
            x,
        });
    }
    Ok(())
}

/// Points sampled when isolating the factor's sign changes. Oscillations
/// finer than the resulting grid spacing cannot be split correctly, which
/// bounds the integrable oscillation rate (ample for every registry
/// function at test scale).
const SPLIT_SCAN_POINTS: usize = 2049;

/// Running sum of nonnegative piece integrals kept as
/// `value * exp(log_scale)` so deep-tail pieces never underflow.
struct LogAcc {
    value: f64,
    log_scale: f64,
}

impl LogAcc {
    fn zero() -> Self {
        Self {
            value: 0.0,
            log_scale: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, value: f64, log_scale: f64) {
        if value == 0.0 || log_scale == f64::NEG_INFINITY {
            return;
        }
        if self.value == 0.0 {
            self.value = value;
            self.log_scale = log_scale;
            return;
        }
        let m = self.log_scale.max(log_scale);
        self.value = self.value * (self.log_scale - m).exp() + value * (log_scale - m).exp();
        self.log_scale = m;
    }
}

/// `(pos - neg) * exp(log_prefactor)` with the subtraction done at a shared
/// log scale.
fn combine_signed(pos: &LogAcc, neg: &LogAcc, log_prefactor: f64) -> f64 {
    if pos.value == 0.0 && neg.value == 0.0 {
        return 0.0;
    }
    let m = if pos.value == 0.0 {
        neg.log_scale
    } else if neg.value == 0.0 {
        pos.log_scale
    } else {
        pos.log_scale.max(neg.log_scale)
    };
    let p = if pos.value == 0.0 {
        0.0
    } else {
        pos.value * (pos.log_scale - m).exp()
    };
    let n = if neg.value == 0.0 {
        0.0
    } else {
        neg.value * (neg.log_scale - m).exp()
    };
    (p - n) * (m + log_prefactor).exp()
}

/// Bisect a bracketed sign change of `factor` down to floating-point
/// resolution. `fa_pos` is the sign at the left end.
fn bisect_crossing(factor: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa_pos: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let fm = factor(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == fa_pos {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `exp(log_prefactor) * integral exp(log_weight(t)) * factor(t) dt` over
/// `window`, as the signed split `factor = factor+ - factor-`.
///
/// The split is integrated piecewise between the factor's sign changes so
/// that every `integrate_exp_log` call sees an analytic integrand; clamping
/// `max(+-factor, 0)` across a crossing would otherwise put a kink in the
/// integrand and stall the panel refinement at quadratic order. Pieces whose
/// sampled maximum sits more than the window margin below the global one are
/// skipped: their relative contribution is below the truncation error
/// already accepted by the window itself.
fn integrate_signed_split(
    log_weight: impl Fn(f64) -> f64,
    factor: impl Fn(f64) -> f64,
    window: (f64, f64),
    log_prefactor: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let (lo, hi) = window;
    let n = SPLIT_SCAN_POINTS;
    let step = (hi - lo) / ((n - 1) as f64);

    // One shared scan: factor values for crossing detection, combined
    // log-magnitude for the global peak and piece pruning.
    let mut ts = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    let mut log_abs = Vec::with_capacity(n);
    let mut global_peak = f64::NEG_INFINITY;
    for k in 0..n {
        let t = lo + step * (k as f64);
        let fv = factor(t);
        let la = log_weight(t) + fv.abs().ln();
        if la.is_finite() {
            global_peak = global_peak.max(la);
        }
        ts.push(t);
        fs.push(fv);
        log_abs.push(la);
    }
    if global_peak == f64::NEG_INFINITY {
        // factor vanishes at every sample
        return Ok(0.0);
    }

    // Piece boundaries: window ends, every bracketed crossing (bisected),
    // every exact zero hit by the scan.
    let mut bounds = vec![lo];
    for k in 0..n - 1 {
        if fs[k] == 0.0 {
            if ts[k] > lo {
                bounds.push(ts[k]);
            }
            continue;
        }
        if fs[k + 1] == 0.0 || fs[k] * fs[k + 1] > 0.0 {
            continue;
        }
        bounds.push(bisect_crossing(&factor, ts[k], ts[k + 1], fs[k] > 0.0));
    }
    bounds.push(hi);

    let prune_below = global_peak - cfg.window_margin - 5.0;
    let mut pos = LogAcc::zero();
    let mut neg = LogAcc::zero();
    for pair in bounds.windows(2) {
        let (plo, phi) = (pair[0], pair[1]);
        if phi <= plo {
            continue;
        }
        let mid = 0.5 * (plo + phi);

        // sampled maximum over the piece, midpoint included
        let mut piece_peak = log_weight(mid) + factor(mid).abs().ln();
        let k_lo = ((plo - lo) / step).ceil().max(0.0) as usize;
        let k_hi = (((phi - lo) / step).floor() as usize).min(n - 1);
        for k in k_lo..=k_hi.max(k_lo) {
            if ts[k] >= plo && ts[k] <= phi && log_abs[k].is_finite() {
                piece_peak = piece_peak.max(log_abs[k]);
            }
        }
        if !piece_peak.is_finite() || piece_peak < prune_below {
            continue;
        }

        // constant sign inside the piece by construction
        let sign = if factor(mid) != 0.0 {
            factor(mid) > 0.0
        } else {
            match (k_lo..=k_hi).find(|&k| fs[k] != 0.0) {
                Some(k) => fs[k] > 0.0,
                None => continue,
            }
        };
        let signed = |t: f64| {
            let v = factor(t);
            let v = if sign { v } else { -v };
            // clamp guards against sign leakage at the bisected endpoints
            log_weight(t) + v.max(0.0).ln()
        };
        let r = quadrature::integrate_exp_log(signed, (plo, phi), cfg)?;
        if sign {
            pos.add(r.value, r.log_scale);
        } else {
            neg.add(r.value, r.log_scale);
        }
    }
    Ok(combine_signed(&pos, &neg, log_prefactor))
}

/// `(T f)(x)`: integrate the kernel against `f` over an admissible window.
pub fn apply(
    params: &OperatorParams,
    f: &GrowthBoundedFunction,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    check_admissible(params, f, x)?;
    if f.scale == 0.0 {
        return Ok(0.0);
    }

    let (center, scale) = kernel::kernel_location_scale(params, x);
    let log_k = |nu: f64| kernel::log_kernel(params, KernelPoint { x, nu });

    // Window against the certificate envelope, which dominates both split
    // parts; the additive ln(scale) offset cancels out of the margin test.
    let ln_scale = f.scale.ln();
    let rate = f.rate;
    let envelope = |nu: f64| log_k(nu) + ln_scale + rate * nu.abs();
    let window = quadrature::expand_window(envelope, center, scale, cfg)?;

    // the tilt component goes into the log weight so the factor stays
    // bounded by the certificate scale
    let tilt = f.tilt;
    integrate_signed_split(
        |nu| log_k(nu) + tilt * nu,
        |nu| (f.base)(nu),
        window,
        0.0,
        cfg,
    )
}

/// Closed form of `(T e^{theta nu})(x)`.
///
/// Defined where `|arctan(x/a) + a theta / lambda| < pi/2`; outside, the
/// exponential moment diverges and a `DomainError` is returned.
pub fn mgf_closed_form(params: &OperatorParams, x: f64, theta: f64) -> Result<f64> {
    if !x.is_finite() || !theta.is_finite() {
        return Err(Error::Domain(format!(
            "mgf arguments must be finite, got (x={x}, theta={theta})"
        )));
    }
    let a = params.a();
    let lambda = params.lambda();
    let phi = a * theta / lambda;
    if ((x / a).atan() + phi).abs() >= FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "exponential moment diverges: |arctan(x/a) + a*theta/lambda| >= pi/2 \
             at (lambda={lambda}, a={a}, x={x}, theta={theta})"
        )));
    }
    let base = phi.cos() - (x / a) * phi.sin();
    // base = sqrt(a^2+x^2)/a * cos(arctan(x/a) + phi) > 0 inside the domain
    Ok((-lambda * base.ln()).exp())
}

/// The multiplier polynomial `Q_p` with `d^p kappa / dx^p = Q_p(x, nu) kappa`.
///
/// Stored exactly: `Q_p = N_p(x, a^2, lambda, nu - x) / (a^2 + x^2)^p` where
/// `N_p` has integer coefficients. Every monomial of `N_p`, written as
/// `lambda^{i+j} (nu-x)^j g(x, a^2)`, satisfies `2i + j <= p` with
/// `i, j >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeKernelPolynomial {
    order: u32,
    // variables: 0 -> x, 1 -> a^2, 2 -> lambda, 3 -> (nu - x)
    numerator: RatPoly<4>,
}

/// Highest supported derivative order.
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

impl DerivativeKernelPolynomial {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Numerator `N_p` over the variables `(x, a^2, lambda, nu - x)`.
    pub fn numerator(&self) -> &RatPoly<4> {
        &self.numerator
    }

    /// Evaluate `Q_p(x, nu)` for the given parameters.
    pub fn eval(&self, params: &OperatorParams, x: f64, nu: f64) -> f64 {
        let a2 = params.a() * params.a();
        let num = self
            .numerator
            .eval_f64(&[x, a2, params.lambda(), nu - x]);
        num / (a2 + x * x).powi(self.order as i32)
    }

    /// Check the `2i + j <= p` monomial structure (with `i, j >= 0`).
    pub fn structure_ok(&self) -> bool {
        self.numerator.terms().all(|(e, _)| {
            let lambda_pow = e[2]; // = i + j
            let d_pow = e[3]; // = j
            d_pow <= lambda_pow && 2 * lambda_pow - d_pow <= self.order as u16
        })
    }
}

/// Build `Q_p` by the log-derivative recurrence
/// `Q_{p+1} = dQ_p/dx + Q_p * lambda (nu - x) / (a^2 + x^2)`, `Q_0 = 1`.
pub fn derivative_kernel(p: u32) -> Result<DerivativeKernelPolynomial> {
    if p > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrderUnsupported(p));
    }
    // In numerator form: N_{p+1} = (a^2 + x^2)(dN_p/dx - dN_p/dD)
    //                              - 2 p x N_p + lambda D N_p.
    // The -dN_p/dD term is the chain rule through D = nu - x at fixed nu.
    let x = RatPoly::<4>::var(0);
    let a2 = RatPoly::<4>::var(1);
    let lambda = RatPoly::<4>::var(2);
    let d = RatPoly::<4>::var(3);
    let denom_base = a2.add(&x.mul(&x));
    let lambda_d = lambda.mul(&d);

    let mut n = RatPoly::<4>::one();
    for order in 0..p {
        let dx = n.derivative(0).sub(&n.derivative(3));
        let shift = x
            .mul(&n)
            .scale(&BigRational::from_integer((-2i64 * order as i64).into()));
        n = denom_base.mul(&dx).add(&shift).add(&lambda_d.mul(&n));
    }
    Ok(DerivativeKernelPolynomial {
        order: p,
        numerator: n,
    })
}

/// `d^p/dx^p (T f)(x)`: integrate `Q_p * kernel` against `f`.
pub fn apply_derivative(
    params: &OperatorParams,
    f: &GrowthBoundedFunction,
    x: f64,
    p: u32,
    cfg: &QuadConfig,
) -> Result<f64> {
    if p == 0 {
        return apply(params, f, x, cfg);
    }
    let q = derivative_kernel(p)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    check_admissible(params, f, x)?;
    if f.scale == 0.0 {
        return Ok(0.0);
    }

    let (center, scale) = kernel::kernel_location_scale(params, x);
    let log_k = |nu: f64| kernel::log_kernel(params, KernelPoint { x, nu });
    let qv = |nu: f64| q.eval(params, x, nu);

    // ln(1 + |Q_p|) >= ln |Q_p| keeps the envelope an upper bound while
    // staying finite at the polynomial's roots.
    let ln_scale = f.scale.ln();
    let rate = f.rate;
    let envelope = |nu: f64| log_k(nu) + ln_scale + rate * nu.abs() + qv(nu).abs().ln_1p();
    let window = quadrature::expand_window(envelope, center, scale, cfg)?;

    let tilt = f.tilt;
    integrate_signed_split(
        |nu| log_k(nu) + tilt * nu,
        |nu| qv(nu) * (f.base)(nu),
        window,
        0.0,
        cfg,
    )
}

/// `(P_lambda f)(x)`, the Post-Widder operator at `x > 0`:
/// `lambda^lambda / (x^lambda Gamma(lambda)) * integral nu^{lambda-1}
/// e^{-lambda nu / x} f(nu) dnu` over `(0, inf)`.
///
/// Computed after the substitution `nu = e^u`, which removes the endpoint
/// singularity for `lambda < 1` and gives a well-scaled bell shape centered
/// at `u = ln x` with width `1/sqrt(lambda)`.
pub fn apply_post_widder(
    lambda: f64,
    f: &GrowthBoundedFunction,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be finite and > 0, got {lambda}"
        )));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "Post-Widder requires x > 0, got {x}"
        )));
    }
    let bound = 0.9 * lambda / x;
    if f.rate >= bound {
        return Err(Error::GrowthTooFast {
            rate: f.rate,
            bound,
            lambda,
            a: 0.0, // the a -> 0 limit member
            x,
        });
    }
    if f.scale == 0.0 {
        return Ok(0.0);
    }

    let log_prefactor = lambda * lambda.ln() - lambda * x.ln() - specfun::ln_gamma_real(lambda)?;
    // u-space log-weight: lambda u - (lambda / x) e^u
    let weight = move |u: f64| lambda * u - (lambda / x) * u.exp();
    let ln_scale = f.scale.ln();
    let rate = f.rate;
    let envelope = |u: f64| weight(u) + ln_scale + rate * u.exp();
    let window = quadrature::expand_window(envelope, x.ln(), lambda.sqrt().recip(), cfg)?;

    let tilt = f.tilt;
    integrate_signed_split(
        |u| weight(u) + tilt * u.exp(),
        |u| (f.base)(u.exp()),
        window,
        log_prefactor,
        cfg,
    )
}
