//! Deterministic log-domain integration.
//!
//! Integrands arrive as log-densities `g` and the integral of `exp(g)` is
//! what comes back, split as `mantissa * exp(log_scale)` so that nothing
//! overflows on the way. Two stages:
//!
//! 1. [`expand_window`] grows a finite window around a location/scale guess
//!    until the log-integrand at both endpoints sits `window_margin` below
//!    the sampled interior maximum, i.e. until the truncated tails are
//!    provably negligible relative to the peak.
//! 2. [`integrate_exp_log`] shifts by the sampled maximum, then applies
//!    composite fixed-order Gauss-Legendre with dyadic panel refinement and
//!    compensated summation until two successive refinements agree.
//!
//! Everything is sequential and allocation-free in the hot path, so repeated
//! calls with identical inputs produce bit-identical results.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Nodes per panel. Composite refinement handles the rest.
const PANEL_ORDER: usize = 16;
/// First refinement level: `2^4 = 16` panels.
const FIRST_LEVEL: usize = 16;
/// Points sampled when locating the interior maximum of a window.
const SHIFT_SCAN_POINTS: usize = 513;
/// Points sampled per side while expanding a window.
const WINDOW_SCAN_POINTS: usize = 65;
/// Window growth cap, in units of `scale`.
const WINDOW_CAP_FACTOR: f64 = 1.0995116e12; // 2^40

/// Tolerances and limits for window expansion and panel refinement.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Successive refinements must agree to this relative tolerance.
    pub rel_tol: f64,
    /// ... or to this absolute tolerance on the integral's true scale.
    pub abs_tol: f64,
    /// Refinement stops (with `NotConverged`) past this many panels.
    pub max_panels: usize,
    /// Required log-drop from interior maximum to window endpoints.
    pub window_margin: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::with_rel_tol(1e-10)
    }
}

impl QuadConfig {
    /// Standard configuration for a given relative tolerance: the window
    /// margin tracks the tolerance so truncation never dominates.
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 1e-14,
            max_panels: 1 << 16,
            window_margin: 5.0 + (1.0 / rel_tol).ln(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Domain(format!(
                "rel_tol must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::Domain(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_panels < 2 * FIRST_LEVEL {
            return Err(Error::Domain(format!(
                "max_panels must be >= {}, got {}",
                2 * FIRST_LEVEL,
                self.max_panels
            )));
        }
        if !(self.window_margin.is_finite() && self.window_margin > 0.0) {
            return Err(Error::Domain(format!(
                "window_margin must be > 0, got {}",
                self.window_margin
            )));
        }
        Ok(())
    }
}

/// Integration result; the integral equals `value * exp(log_scale)`.
///
/// `value` is the mantissa of the shifted integrand, `log_scale` the shift;
/// [`QuadResult::total`] collapses the pair when it fits in an `f64`.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub log_scale: f64,
    /// Last refinement delta, in mantissa units.
    pub est_error: f64,
    pub panels_used: usize,
    pub window: (f64, f64),
}

impl QuadResult {
    /// The integral as a plain `f64` (may under/overflow; the field pair
    /// never does).
    pub fn total(&self) -> f64 {
        self.value * self.log_scale.exp()
    }

    /// `ln` of the integral, assuming it is positive.
    pub fn log_total(&self) -> f64 {
        self.value.ln() + self.log_scale
    }
}

fn gauss_legendre_16() -> &'static ([f64; PANEL_ORDER], [f64; PANEL_ORDER]) {
    static NODES: OnceLock<([f64; PANEL_ORDER], [f64; PANEL_ORDER])> = OnceLock::new();
    NODES.get_or_init(|| {
        // Newton on Legendre P_16; converges to full precision in < 10 steps.
        let n = PANEL_ORDER;
        let mut xs = [0.0; PANEL_ORDER];
        let mut ws = [0.0; PANEL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            xs[n - 1 - i] = x;
            ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Grow `[center - h_l, center + h_r]` (starting at `h = 8 * scale`, doubling
/// a side whenever its endpoint is not yet `window_margin` below the sampled
/// interior maximum) until both endpoints clear the margin.
///
/// Fails with `WindowNotFound` once a half-width passes `2^40 * scale`, and
/// with `DomainError` if the integrand is not finite at `center` or the
/// inputs are malformed.
pub fn expand_window<F: Fn(f64) -> f64>(
    log_integrand: F,
    center: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !center.is_finite() || !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Domain(format!(
            "window seed must be finite with scale > 0, got (center={center}, scale={scale})"
        )));
    }
    if !log_integrand(center).is_finite() {
        return Err(Error::Domain(format!(
            "log-integrand must be finite at the window center {center}"
        )));
    }
    let cap = WINDOW_CAP_FACTOR * scale;
    let mut h_left = 8.0 * scale;
    let mut h_right = 8.0 * scale;
    loop {
        let lo = center - h_left;
        let hi = center + h_right;
        // interior maximum over an evenly spaced scan, endpoints excluded
        let mut interior_max = f64::NEG_INFINITY;
        let n = WINDOW_SCAN_POINTS;
        for k in 1..n - 1 {
            let t = lo + (hi - lo) * (k as f64) / ((n - 1) as f64);
            interior_max = interior_max.max(log_integrand(t));
        }
        let need = interior_max - cfg.window_margin;
        let ok_left = log_integrand(lo) <= need;
        let ok_right = log_integrand(hi) <= need;
        if ok_left && ok_right {
            return Ok((lo, hi));
        }
        if !ok_left {
            h_left *= 2.0;
        }
        if !ok_right {
            h_right *= 2.0;
        }
        if h_left > cap || h_right > cap {
            return Err(Error::WindowNotFound {
                half_width: h_left.max(h_right),
                cap,
            });
        }
    }
}

/// One-sided window growth for tail integration: extend from a fixed `start`
/// in `direction` (+1 right, -1 left) until the far endpoint sits
/// `window_margin` below the maximum sampled on the segment. Unlike
/// [`expand_window`], the near endpoint stays put, and `start` itself
/// participates in the maximum (for a decaying tail it usually is the
/// maximum). Returns the far endpoint.
pub(crate) fn expand_half_window<F: Fn(f64) -> f64>(
    log_integrand: F,
    start: f64,
    direction: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !start.is_finite() || !scale.is_finite() || scale <= 0.0 || direction.abs() != 1.0 {
        return Err(Error::Domain(format!(
            "half-window seed must be finite with scale > 0 and direction +-1, \
             got (start={start}, scale={scale}, direction={direction})"
        )));
    }
    if !log_integrand(start).is_finite() {
        return Err(Error::Domain(format!(
            "log-integrand must be finite at the half-window start {start}"
        )));
    }
    let cap = WINDOW_CAP_FACTOR * scale;
    let mut h = 8.0 * scale;
    loop {
        let end = start + direction * h;
        let n = WINDOW_SCAN_POINTS;
        let mut seg_max = f64::NEG_INFINITY;
        for k in 0..n - 1 {
            let t = start + direction * h * (k as f64) / ((n - 1) as f64);
            seg_max = seg_max.max(log_integrand(t));
        }
        if log_integrand(end) <= seg_max - cfg.window_margin {
            return Ok(end);
        }
        h *= 2.0;
        if h > cap {
            return Err(Error::WindowNotFound { half_width: h, cap });
        }
    }
}

/// Integrate `exp(log_integrand)` over `window`.
///
/// The integrand is shifted by its sampled maximum `M` (returned as
/// `log_scale`), then composite Gauss-Legendre sums with 16, 32, 64, ...
/// panels are compared until two successive levels agree within
/// `max(rel_tol * |value|, abs_tol * exp(-M))`; compensated summation keeps
/// the panel sums deterministic at machine accuracy.
pub fn integrate_exp_log<F: Fn(f64) -> f64>(
    log_integrand: F,
    window: (f64, f64),
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "window must be finite with lo < hi, got ({lo}, {hi})"
        )));
    }

    // Shift by the sampled maximum so exp() stays in range.
    let mut shift = f64::NEG_INFINITY;
    for k in 0..SHIFT_SCAN_POINTS {
        let t = lo + (hi - lo) * (k as f64) / ((SHIFT_SCAN_POINTS - 1) as f64);
        let g = log_integrand(t);
        if g.is_finite() {
            shift = shift.max(g);
        }
    }
    if shift == f64::NEG_INFINITY {
        // Integrand vanishes at every sample: treat as identically zero.
        return Ok(QuadResult {
            value: 0.0,
            log_scale: 0.0,
            est_error: 0.0,
            panels_used: 0,
            window,
        });
    }

    // abs_tol lives on the integral's true scale; move it to mantissa units.
    let abs_tol_shifted = (cfg.abs_tol.ln() - shift).exp();

    let mut prev = composite_sum(&log_integrand, lo, hi, shift, FIRST_LEVEL);
    let mut panels = FIRST_LEVEL;
    loop {
        panels *= 2;
        let cur = composite_sum(&log_integrand, lo, hi, shift, panels);
        let delta = (cur - prev).abs();
        if delta <= f64::max(cfg.rel_tol * cur.abs(), abs_tol_shifted) {
            return Ok(QuadResult {
                value: cur,
                log_scale: shift,
                est_error: delta,
                panels_used: panels,
                window,
            });
        }
        if panels * 2 > cfg.max_panels {
            return Err(Error::NotConverged {
                panels,
                last_delta: delta,
            });
        }
        prev = cur;
    }
}

/// Composite 16-point Gauss-Legendre sum of `exp(g - shift)` with Kahan
/// compensation, in a fixed left-to-right order.
fn composite_sum<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64, shift: f64, panels: usize) -> f64 {
    let (xs, ws) = gauss_legendre_16();
    let width = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 0..panels {
        let a = lo + width * i as f64;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        for k in 0..PANEL_ORDER {
            let t = mid + half * xs[k];
            let term = ws[k] * half * (g(t) - shift).exp();
            // Kahan step
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
    }
    sum
}
