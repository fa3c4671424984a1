//! Numerical verification of the family's limit theorems, plus the
//! convergence experiment runner behind the `converge` CLI command.
//!
//! The checks here turn asymptotic statements into falsifiable numbers:
//! residuals that must vanish like `1/lambda`, tail masses that must decay
//! super-polynomially, and an error bound that must dominate the measured
//! error on every tested cell.

use crate::error::{Error, Result};
use crate::functions::SmoothFunction;
use crate::kernel::{self, KernelPoint, OperatorParams};
use crate::operators::{self, GrowthBoundedFunction};
use crate::quadrature::{self, QuadConfig};
use serde::{Deserialize, Serialize};

/// `lambda [ (T f)(x) - f(x) ] - (a^2 + x^2)/2 * f''(x)`.
///
/// Tends to 0 like `O(1/lambda)` for smooth admissible `f`; identically 0
/// (up to quadrature noise) for quadratics.
pub fn voronovskaja_residual(
    params: &OperatorParams,
    f: &SmoothFunction,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let tf = operators::apply(params, &f.to_growth_bounded(), x, cfg)?;
    let s = params.a() * params.a() + x * x;
    Ok(params.lambda() * (tf - f.eval(x)) - 0.5 * s * f.derivative(2, x)?)
}

/// Both sides of the first-order simultaneous-approximation limit for the
/// `p`-th derivative, `p` in {1, 2}:
///
/// `lhs = lambda [ (T^{(p)} f)(x) - f^{(p)}(x) ]`,
/// `rhs = p(p-1)/2 f^{(p)}(x) + p x f^{(p+1)}(x) + (a^2+x^2)/2 f^{(p+2)}(x)`.
///
/// `|lhs - rhs| -> 0` as `lambda` grows.
pub fn simultaneous_check(
    params: &OperatorParams,
    f: &SmoothFunction,
    x: f64,
    p: u32,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    if !(1..=2).contains(&p) {
        return Err(Error::Domain(format!(
            "simultaneous check is stated for p in {{1, 2}}, got {p}"
        )));
    }
    let tp = operators::apply_derivative(params, &f.to_growth_bounded(), x, p, cfg)?;
    let fp = f.derivative(p, x)?;
    let lhs = params.lambda() * (tp - fp);
    let pf = p as f64;
    let s = params.a() * params.a() + x * x;
    let rhs =
        0.5 * pf * (pf - 1.0) * fp + pf * x * f.derivative(p + 1, x)? + 0.5 * s * f.derivative(p + 2, x)?;
    Ok((lhs, rhs))
}

/// `| (T_{m,a} f(./lambda))(lambda x) - (P_m f)(x) |`: the compression of
/// the operator family onto the Post-Widder operator. Decreases along a
/// lambda-ladder; for `f = e_2` it equals `a^2 / (m lambda^2)` exactly.
pub fn scaling_limit_residual(
    m: f64,
    a: f64,
    f: &SmoothFunction,
    x: f64,
    lambda: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be finite and > 0, got {lambda}"
        )));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "scaling limit compares against Post-Widder, so x > 0 is required, got {x}"
        )));
    }
    let params = OperatorParams::new(m, a)?;
    // f(nu / lambda) obeys |f(nu/lambda)| <= K e^{(N/lambda) |nu|}
    let inner = f.clone();
    let scaled = GrowthBoundedFunction::new(
        format!("{}-compressed", f.label()),
        f.growth_scale(),
        f.growth_rate() / lambda,
        move |nu| inner.eval(nu / lambda),
    )?;
    let t = operators::apply(&params, &scaled, lambda * x, cfg)?;
    let pw = operators::apply_post_widder(m, &f.to_growth_bounded(), x, cfg)?;
    Ok((t - pw).abs())
}

/// Kernel mass outside `[x - delta, x + delta]` under the tilt
/// `e^{rate |nu|}`: `integral_{|nu - x| >= delta} kappa(x, nu) e^{rate |nu|}
/// dnu`.
///
/// Positive, decreasing in `delta` and in `lambda`; the decay in `lambda`
/// is super-polynomial (each doubling of `lambda` shrinks it by a growing
/// factor).
pub fn tail_mass(
    params: &OperatorParams,
    x: f64,
    delta: f64,
    rate: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !x.is_finite() || !delta.is_finite() || delta < 0.0 {
        return Err(Error::Domain(format!(
            "need finite x and delta >= 0, got (x={x}, delta={delta})"
        )));
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::Domain(format!(
            "tilt rate must be finite and >= 0, got {rate}"
        )));
    }
    let bound = 0.9 * operators::admissible_rate(params, x);
    if rate >= bound {
        return Err(Error::GrowthTooFast {
            rate,
            bound,
            lambda: params.lambda(),
            a: params.a(),
            x,
        });
    }

    let g = |nu: f64| kernel::log_kernel(params, KernelPoint { x, nu }) + rate * nu.abs();
    let (_, scale) = kernel::kernel_location_scale(params, x);
    // Deep tails sit far below the absolute-tolerance floor, which is stated
    // on the full integral's scale; drop it so convergence is purely
    // relative in each tail piece.
    let mut tail_cfg = *cfg;
    tail_cfg.abs_tol = 1e-300;

    // The tilt's |nu| puts a derivative kink at nu = 0; integrate each side
    // of it separately whenever it falls strictly inside a tail piece, so
    // the panel refinement keeps its full convergence order.
    let piece = |a: f64, b: f64| -> Result<f64> {
        if a >= b {
            return Ok(0.0);
        }
        if a < 0.0 && 0.0 < b {
            let lo = quadrature::integrate_exp_log(g, (a, 0.0), &tail_cfg)?;
            let hi = quadrature::integrate_exp_log(g, (0.0, b), &tail_cfg)?;
            Ok(lo.total() + hi.total())
        } else {
            Ok(quadrature::integrate_exp_log(g, (a, b), &tail_cfg)?.total())
        }
    };

    let right_start = x + delta;
    let right_end = quadrature::expand_half_window(g, right_start, 1.0, scale, &tail_cfg)?;
    let right = piece(right_start, right_end)?;

    let left_start = x - delta;
    let left_end = quadrature::expand_half_window(g, left_start, -1.0, scale, &tail_cfg)?;
    let left = piece(left_end, left_start)?;

    Ok(right + left)
}

/// Outcome of [`usual_modulus_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusBoundCheck {
    /// Measured `|lambda [Tf - f] - (a^2+x^2)/2 f''|`.
    pub lhs: f64,
    /// Bound with the modulus of continuity of `f''` replaced by its upper
    /// bound `M3 / sqrt(lambda)`.
    pub rhs_upper: f64,
    /// `lhs <= rhs_upper` up to the quadrature noise floor of the lhs.
    pub ok: bool,
}

/// Check the second-modulus error bound
/// `2 (a^2+x^2) omega(f'', 1/sqrt(lambda)) [1 + (3(lambda+2)x^2 +
/// (3 lambda+2)a^2)/lambda]` with `omega(f'', d) <= M3 d` for a certified
/// `M3 >= sup |f'''|`.
///
/// The inflated bound must dominate; `ok = false` signals a bug, not a
/// sharpness failure. The comparison grants the lhs its quadrature noise
/// floor (`lambda` times the integration tolerance), without which an
/// exactly-zero bound (e.g. quadratics, M3 = 0) would fail on roundoff.
pub fn usual_modulus_bound_check(
    params: &OperatorParams,
    f: &SmoothFunction,
    m3: f64,
    x: f64,
    cfg: &QuadConfig,
) -> Result<ModulusBoundCheck> {
    if !m3.is_finite() || m3 < 0.0 {
        return Err(Error::Domain(format!(
            "M3 must be finite and >= 0, got {m3}"
        )));
    }
    let lambda = params.lambda();
    let a = params.a();
    let tf = operators::apply(params, &f.to_growth_bounded(), x, cfg)?;
    let s = a * a + x * x;
    let lhs = (lambda * (tf - f.eval(x)) - 0.5 * s * f.derivative(2, x)?).abs();
    let bracket = 1.0 + (3.0 * (lambda + 2.0) * x * x + (3.0 * lambda + 2.0) * a * a) / lambda;
    let rhs_upper = 2.0 * s * (m3 / lambda.sqrt()) * bracket;
    let noise_floor = 10.0 * lambda * (cfg.rel_tol * (1.0 + tf.abs()) + cfg.abs_tol);
    Ok(ModulusBoundCheck {
        lhs,
        rhs_upper,
        ok: lhs <= rhs_upper + noise_floor,
    })
}

/// The sixth-central-moment factor
/// `Xi = 5 x^4 (3 lambda^2 + 26 lambda + 24) + 10 a^2 x^2 (3 lambda^2 +
/// 16 lambda + 12) + a^4 (15 lambda^2 + 30 lambda + 16)`,
/// satisfying `mu_6 = (a^2 + x^2) Xi / lambda^5`.
pub fn xi_factor(params: &OperatorParams, x: f64) -> f64 {
    let l = params.lambda();
    let a2 = params.a() * params.a();
    let x2 = x * x;
    5.0 * x2 * x2 * (3.0 * l * l + 26.0 * l + 24.0)
        + 10.0 * a2 * x2 * (3.0 * l * l + 16.0 * l + 12.0)
        + a2 * a2 * (15.0 * l * l + 30.0 * l + 16.0)
}

/// Least-squares slope of `ln y` against `ln x`. The residual-decay checks
/// use it to measure convergence orders.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain(format!(
            "slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x.is_finite() && x > 0.0 && y.is_finite() && y > 0.0) {
            return Err(Error::Domain(format!(
                "slope fit needs positive finite points, got ({x}, {y})"
            )));
        }
        logs.push((x.ln(), y.ln()));
    }
    let n = logs.len() as f64;
    let mean_u = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (u, v) in logs {
        cov += (u - mean_u) * (v - mean_v);
        var += (u - mean_u) * (u - mean_u);
    }
    if var == 0.0 {
        return Err(Error::Domain("slope fit needs distinct x values".into()));
    }
    Ok(cov / var)
}

/// One rung of an `a`-ladder: a positive value for the operator family, or
/// the Post-Widder limit member. Serializes as a JSON number or the string
/// `"PW"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ALevelRepr", into = "ALevelRepr")]
pub enum ALevel {
    Value(f64),
    PostWidder,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ALevelRepr {
    Num(f64),
    Text(String),
}

impl TryFrom<ALevelRepr> for ALevel {
    type Error = String;

    fn try_from(repr: ALevelRepr) -> std::result::Result<Self, String> {
        match repr {
            ALevelRepr::Num(v) => Ok(ALevel::Value(v)),
            ALevelRepr::Text(s) if s == "PW" => Ok(ALevel::PostWidder),
            ALevelRepr::Text(s) => Err(format!(
                "unknown a-ladder entry {s:?}; expected a number or \"PW\""
            )),
        }
    }
}

impl From<ALevel> for ALevelRepr {
    fn from(a: ALevel) -> ALevelRepr {
        match a {
            ALevel::Value(v) => ALevelRepr::Num(v),
            ALevel::PostWidder => ALevelRepr::Text("PW".into()),
        }
    }
}

impl std::fmt::Display for ALevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ALevel::Value(v) => f.write_str(&format_sig17(*v)),
            ALevel::PostWidder => f.write_str("PW"),
        }
    }
}

/// Uniform grid of `count` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * (i as f64) / ((self.count - 1) as f64))
            .collect()
    }
}

fn default_rel_tol() -> f64 {
    1e-10
}

/// A convergence experiment: one registry function evaluated on a grid for
/// every `(a, lambda)` rung combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub function: String,
    pub a_ladder: Vec<ALevel>,
    pub lambda_ladder: Vec<f64>,
    pub x_grid: XGrid,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.a_ladder.is_empty() || self.lambda_ladder.is_empty() {
            return Err(Error::Domain("ladders must be non-empty".into()));
        }
        for a in &self.a_ladder {
            if let ALevel::Value(v) = a {
                if !v.is_finite() || *v <= 0.0 {
                    return Err(Error::Domain(format!(
                        "a-ladder values must be finite and > 0, got {v}"
                    )));
                }
            }
        }
        for l in &self.lambda_ladder {
            if !l.is_finite() || *l <= 0.0 {
                return Err(Error::Domain(format!(
                    "lambda-ladder values must be finite and > 0, got {l}"
                )));
            }
        }
        let g = &self.x_grid;
        if !g.lo.is_finite() || !g.hi.is_finite() || g.count == 0 {
            return Err(Error::Domain(format!(
                "x-grid must be finite with count >= 1, got ({}, {}, {})",
                g.lo, g.hi, g.count
            )));
        }
        if g.count > 1 && g.lo >= g.hi {
            return Err(Error::Domain(format!(
                "x-grid needs lo < hi for count > 1, got ({}, {})",
                g.lo, g.hi
            )));
        }
        if self.a_ladder.contains(&ALevel::PostWidder) && g.lo <= 0.0 {
            return Err(Error::Domain(format!(
                "Post-Widder rungs need an x-grid with lo > 0, got lo = {}",
                g.lo
            )));
        }
        if !self.rel_tol.is_finite() || self.rel_tol <= 0.0 || self.rel_tol >= 1.0 {
            return Err(Error::Domain(format!(
                "rel_tol must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub function: String,
    pub a: ALevel,
    pub lambda: f64,
    pub x: f64,
    /// `None` when the cell was unavailable (admissibility or convergence
    /// failure); the run continues regardless.
    pub op_value: Option<f64>,
    pub f_value: f64,
    pub abs_error: Option<f64>,
}

/// Sup-error over the grid for one `(a, lambda)` rung combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub a: ALevel,
    pub lambda: f64,
    pub sup_error: Option<f64>,
}

/// Full experiment output: rows in deterministic `(a, lambda, x)` ladder
/// order, then one summary per `(a, lambda)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub summaries: Vec<SummaryRow>,
}

/// 17-significant-digit scientific notation: every binary64 value
/// round-trips losslessly through this form.
pub fn format_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), format_sig17)
}

impl ConvergenceReport {
    /// CSV with the row block, then a summary block with its own header.
    /// LF line endings; unavailable cells print `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("function,a,lambda,x,op_value,f_value,abs_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.function,
                r.a,
                format_sig17(r.lambda),
                format_sig17(r.x),
                format_opt(r.op_value),
                format_sig17(r.f_value),
                format_opt(r.abs_error),
            ));
        }
        out.push_str("function,a,lambda,sup_error\n");
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.function,
                s.a,
                format_sig17(s.lambda),
                format_opt(s.sup_error),
            ));
        }
        out
    }

    /// Sup-error for a given rung, if that group had any available cell.
    pub fn sup_error(&self, a: ALevel, lambda: f64) -> Option<f64> {
        self.summaries
            .iter()
            .find(|s| s.a == a && s.lambda == lambda)
            .and_then(|s| s.sup_error)
    }
}

/// Run the experiment for a registry function label. Polynomially bounded
/// functions get their certificate scale widened to cover the grid
/// (`K = 1 + max|x|^2`); the scale never affects admissibility or windows,
/// only the honesty of the certificate.
pub fn run_convergence_experiment(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    let mut f = SmoothFunction::from_label(&spec.function, None)?;
    if f.poly_bounded() {
        let grid_max = spec.x_grid.lo.abs().max(spec.x_grid.hi.abs());
        f = f.with_growth_scale(1.0 + grid_max * grid_max)?;
    }
    run_convergence_experiment_with(spec, &f.to_growth_bounded())
}

/// Run the experiment for an arbitrary certified function (the `custom`
/// escape hatch; the label in `spec` is used only for labeling rows).
pub fn run_convergence_experiment_with(
    spec: &ExperimentSpec,
    f: &GrowthBoundedFunction,
) -> Result<ConvergenceReport> {
    spec.validate()?;
    let cfg = QuadConfig::with_rel_tol(spec.rel_tol);
    let xs = spec.x_grid.points();
    let mut rows = Vec::with_capacity(spec.a_ladder.len() * spec.lambda_ladder.len() * xs.len());
    let mut summaries = Vec::with_capacity(spec.a_ladder.len() * spec.lambda_ladder.len());

    for &a in &spec.a_ladder {
        for &lambda in &spec.lambda_ladder {
            let mut sup: Option<f64> = None;
            for &x in &xs {
                let attempt = match a {
                    ALevel::Value(av) => OperatorParams::new(lambda, av)
                        .and_then(|params| operators::apply(&params, f, x, &cfg)),
                    ALevel::PostWidder => operators::apply_post_widder(lambda, f, x, &cfg),
                };
                let f_value = f.eval(x);
                let (op_value, abs_error) = match attempt {
                    Ok(v) => (Some(v), Some((v - f_value).abs())),
                    Err(_) => (None, None),
                };
                if let Some(e) = abs_error {
                    sup = Some(sup.map_or(e, |s| s.max(e)));
                }
                rows.push(ReportRow {
                    function: spec.function.clone(),
                    a,
                    lambda,
                    x,
                    op_value,
                    f_value,
                    abs_error,
                });
            }
            summaries.push(SummaryRow {
                function: spec.function.clone(),
                a,
                lambda,
                sup_error: sup,
            });
        }
    }
    Ok(ConvergenceReport { rows, summaries })
}
