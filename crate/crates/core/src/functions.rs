//! Named test functions with analytic derivatives.
//!
//! Everything the analysis checks and the CLI expose: monomials `e0..e6`,
//! `xsinx` (`nu sin nu`), `xcospix` (`-(nu/2) cos(pi nu)`), `gauss`
//! (`e^{-nu^2}`) and `exptheta` (`e^{theta nu}`, the exponential-moment
//! probe). Derivatives through order 4 are tabulated analytically, which is
//! what the limit-theorem checks consume; finite differences are used only
//! in tests to validate the tables.

use crate::error::{Error, Result};
use crate::operators::GrowthBoundedFunction;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Monomial(u32),
    XSinX,
    XCosPiX,
    Gauss,
    ExpTilt(f64),
}

/// A test function with tabulated derivatives and a growth certificate
/// `|f(nu)| <= scale * exp(rate |nu|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFunction {
    label: String,
    kind: Kind,
    scale: f64,
    rate: f64,
    poly_bounded: bool,
}

/// Labels accepted by [`SmoothFunction::from_label`].
pub const REGISTRY: &[&str] = &[
    "e0", "e1", "e2", "e3", "e4", "e5", "e6", "xsinx", "xcospix", "gauss", "exptheta",
];

/// Sub-exponential growth is encoded as a vanishingly small certificate
/// rate; the admissibility test is rate-based, so this keeps polynomially
/// bounded functions admissible everywhere without a separate code path.
pub const POLY_RATE: f64 = 1e-6;

impl SmoothFunction {
    /// Resolve a registry label. `exptheta` needs the tilt parameter.
    pub fn from_label(label: &str, theta: Option<f64>) -> Result<Self> {
        let kind = match label {
            "xsinx" => Kind::XSinX,
            "xcospix" => Kind::XCosPiX,
            "gauss" => Kind::Gauss,
            "exptheta" => {
                let theta = theta.ok_or_else(|| {
                    Error::Domain("function exptheta requires a theta value".into())
                })?;
                if !theta.is_finite() {
                    return Err(Error::Domain(format!("theta must be finite, got {theta}")));
                }
                Kind::ExpTilt(theta)
            }
            _ => match label.strip_prefix('e').and_then(|s| s.parse::<u32>().ok()) {
                Some(p) if p <= 6 && label.len() == 2 => Kind::Monomial(p),
                _ => {
                    return Err(Error::Domain(format!(
                        "unknown function label {label:?}; expected one of {REGISTRY:?}"
                    )))
                }
            },
        };
        let (scale, rate, poly_bounded) = match kind {
            Kind::Monomial(0) => (1.0, 0.0, true),
            Kind::Monomial(_) => (1.0, POLY_RATE, true),
            Kind::XSinX | Kind::XCosPiX => (1.0, POLY_RATE, true),
            Kind::Gauss => (1.0, 0.0, false),
            Kind::ExpTilt(theta) => (1.0, theta.abs(), false),
        };
        Ok(Self {
            label: label.to_string(),
            kind,
            scale,
            rate,
            poly_bounded,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn growth_scale(&self) -> f64 {
        self.scale
    }

    pub fn growth_rate(&self) -> f64 {
        self.rate
    }

    /// True when `|f|` is bounded by a polynomial, so any certificate scale
    /// works and callers may tighten it to their evaluation range.
    pub fn poly_bounded(&self) -> bool {
        self.poly_bounded
    }

    /// Replace the certificate scale (the rate is part of the function's
    /// identity and stays).
    pub fn with_growth_scale(mut self, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::Domain(format!(
                "certificate scale must be finite and >= 0, got {scale}"
            )));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn eval(&self, nu: f64) -> f64 {
        self.derivative(0, nu)
            .expect("order 0 is always tabulated")
    }

    /// `f^{(k)}(nu)` from the analytic table; orders above 4 are tabulated
    /// only for monomials.
    pub fn derivative(&self, k: u32, nu: f64) -> Result<f64> {
        match self.kind {
            Kind::Monomial(p) => {
                if k > p {
                    return Ok(0.0);
                }
                let falling: f64 = ((p - k + 1)..=p).map(f64::from).product();
                Ok(falling * nu.powi((p - k) as i32))
            }
            Kind::ExpTilt(theta) => Ok(theta.powi(k as i32) * (theta * nu).exp()),
            Kind::XSinX => {
                let (s, c) = nu.sin_cos();
                match k {
                    0 => Ok(nu * s),
                    1 => Ok(s + nu * c),
                    2 => Ok(2.0 * c - nu * s),
                    3 => Ok(-3.0 * s - nu * c),
                    4 => Ok(-4.0 * c + nu * s),
                    _ => Err(untabulated(&self.label, k)),
                }
            }
            Kind::XCosPiX => {
                let (s, c) = (PI * nu).sin_cos();
                match k {
                    0 => Ok(-0.5 * nu * c),
                    1 => Ok(-0.5 * c + 0.5 * PI * nu * s),
                    2 => Ok(PI * s + 0.5 * PI * PI * nu * c),
                    3 => Ok(1.5 * PI * PI * c - 0.5 * PI.powi(3) * nu * s),
                    4 => Ok(-2.0 * PI.powi(3) * s - 0.5 * PI.powi(4) * nu * c),
                    _ => Err(untabulated(&self.label, k)),
                }
            }
            Kind::Gauss => {
                let g = (-nu * nu).exp();
                match k {
                    0 => Ok(g),
                    1 => Ok(-2.0 * nu * g),
                    2 => Ok((4.0 * nu * nu - 2.0) * g),
                    3 => Ok((12.0 * nu - 8.0 * nu.powi(3)) * g),
                    4 => Ok((16.0 * nu.powi(4) - 48.0 * nu * nu + 12.0) * g),
                    _ => Err(untabulated(&self.label, k)),
                }
            }
        }
    }

    /// Package as an integrable function with this certificate. The tilt
    /// family hands its exponent over as an explicit tilt component, so the
    /// integrators never have to evaluate `exp(theta nu)` in linear space.
    pub fn to_growth_bounded(&self) -> GrowthBoundedFunction {
        if let Kind::ExpTilt(theta) = self.kind {
            return GrowthBoundedFunction::new_tilted(
                self.label.clone(),
                self.scale,
                self.rate,
                theta,
                |_| 1.0,
            )
            .expect("registry certificates are valid");
        }
        let f = self.clone();
        GrowthBoundedFunction::new(self.label.clone(), self.scale, self.rate, move |nu| {
            f.eval(nu)
        })
        .expect("registry certificates are valid")
    }
}

fn untabulated(label: &str, k: u32) -> Error {
    Error::Domain(format!(
        "derivative order {k} of {label} is not tabulated (max 4)"
    ))
}
