//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in a numeric routine.
///
/// Numeric entry points never panic on bad input; they return one of these.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("DomainError: {0}")]
    Domain(String),

    /// Window expansion hit the growth cap without the integrand decaying
    /// below the required margin.
    #[error("WindowNotFound: integrand not confined after expanding to half-width {half_width:e} (cap {cap:e})")]
    WindowNotFound { half_width: f64, cap: f64 },

    /// Panel refinement exhausted `max_panels` before successive estimates
    /// agreed to tolerance.
    #[error("NotConverged: {panels} panels reached, last refinement delta {last_delta:e}")]
    NotConverged { panels: usize, last_delta: f64 },

    /// The function's growth certificate exceeds what the kernel tilt can
    /// absorb at this evaluation point.
    #[error("GrowthTooFast: certified rate {rate} >= admissible bound {bound} at (lambda={lambda}, a={a}, x={x})")]
    GrowthTooFast {
        rate: f64,
        bound: f64,
        lambda: f64,
        a: f64,
        x: f64,
    },

    /// Kernel x-derivatives are implemented for orders 0..=3 only.
    #[error("DerivativeOrderUnsupported: order {0} (supported: 0..=3)")]
    DerivativeOrderUnsupported(u32),
}

impl Error {
    /// Stable diagnostic name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::WindowNotFound { .. } => "WindowNotFound",
            Error::NotConverged { .. } => "NotConverged",
            Error::GrowthTooFast { .. } => "GrowthTooFast",
            Error::DerivativeOrderUnsupported(_) => "DerivativeOrderUnsupported",
        }
    }
}
