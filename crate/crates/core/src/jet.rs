//! Truncated Taylor (jet) arithmetic in one variable.
//!
//! A [`Jet`] of order `P` carries the coefficients `c_0..c_P` of a Taylor
//! expansion; arithmetic is exact truncation to order `P`. Orders are capped
//! at 12: past that the alternating recurrences feeding the moment routes
//! lose digits faster than they gain information.

use crate::error::{Error, Result};

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 12;

/// Taylor coefficients `c_0..c_P` of a scalar function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// The constant `v`, truncated at `order`.
    pub fn constant(v: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Ok(Self { c })
    }

    /// The identity variable based at `v`: coefficients `(v, 1, 0, ...)`.
    pub fn variable(v: f64, order: usize) -> Result<Self> {
        let mut j = Self::constant(v, order)?;
        if order >= 1 {
            j.c[1] = 1.0;
        }
        Ok(j)
    }

    /// Build directly from coefficients (length = order + 1).
    pub fn from_coeffs(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Domain("jet needs at least one coefficient".into()));
        }
        check_order(c.len() - 1)?;
        Ok(Self { c })
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// `k! * c_k`, the k-th derivative encoded by this jet.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.order().max(other.order());
        let mut c = vec![0.0; n + 1];
        for (i, ci) in c.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.coeff(k) * other.coeff(i - k);
            }
            *ci = s;
        }
        Jet { c }
    }

    /// `exp` of the jet (standard convolution recurrence).
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = self.c[0].exp();
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    /// `ln` of the jet; requires a strictly positive constant term.
    pub fn ln(&self) -> Result<Jet> {
        if self.c[0] <= 0.0 || !self.c[0].is_finite() {
            return Err(Error::Domain(format!(
                "jet ln requires positive constant term, got {}",
                self.c[0]
            )));
        }
        let n = self.order();
        let mut l = vec![0.0; n + 1];
        l[0] = self.c[0].ln();
        for k in 1..=n {
            let mut s = k as f64 * self.c[k];
            for j in 1..k {
                s -= j as f64 * l[j] * self.c[k - j];
            }
            l[k] = s / (k as f64 * self.c[0]);
        }
        Ok(Jet { c: l })
    }

    /// Real power `self^alpha`, computed as `exp(alpha * ln self)`.
    pub fn powf(&self, alpha: f64) -> Result<Jet> {
        Ok(self.ln()?.scale(alpha).exp())
    }

    /// `sin` of the jet.
    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    /// `cos` of the jet.
    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Joint `sin`/`cos` via the coupled derivative recurrence.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..=n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                ds += j as f64 * self.c[j] * c[k - j];
                dc += j as f64 * self.c[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let n = self.order().max(other.order());
        let c = (0..=n).map(|k| f(self.coeff(k), other.coeff(k))).collect();
        Jet { c }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "jet order {order} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Exact for the small arguments used here (k <= 12).
pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
