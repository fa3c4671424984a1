//! Sparse multivariate polynomials over exact rationals.
//!
//! Small, deterministic engine behind the symbolic moment recurrence and the
//! kernel-derivative multipliers. `V` is the (compile-time) number of
//! variables; a monomial is its exponent vector, and terms live in a
//! `BTreeMap` so iteration order, equality, and evaluation are all canonical.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A polynomial in `V` variables with `BigRational` coefficients.
///
/// Zero coefficients are never stored, so `==` is exact structural equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly<const V: usize> {
    terms: BTreeMap<[u16; V], BigRational>,
}

impl<const V: usize> RatPoly<V> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; V], c);
        }
        Self { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    /// The monomial `var^1`.
    pub fn var(index: usize) -> Self {
        assert!(index < V, "variable index {index} out of range");
        let mut exps = [0u16; V];
        exps[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, BigRational::one());
        Self { terms }
    }

    /// Single term `c * prod var_i^exps[i]`.
    pub fn term(c: BigRational, exps: [u16; V]) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = out.entry(*e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.remove(e);
            }
        }
        Self { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<[u16; V], BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for i in 0..V {
                    e[i] = e[i]
                        .checked_add(eb[i])
                        .expect("polynomial exponent overflow");
                }
                let entry = out.entry(e).or_insert_with(BigRational::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    out.remove(&e);
                }
            }
        }
        Self { terms: out }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Self {
        assert!(index < V, "variable index {index} out of range");
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[index] == 0 {
                continue;
            }
            let mut d = *e;
            d[index] -= 1;
            out.insert(d, c * BigRational::from_integer(BigInt::from(e[index])));
        }
        Self { terms: out }
    }

    /// Substitute `var[index] -> -var[index]` (exact sign flip per exponent).
    pub fn flip_var_sign(&self, index: usize) -> Self {
        assert!(index < V, "variable index {index} out of range");
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let c = if e[index] % 2 == 1 { -c } else { c.clone() };
                    (*e, c)
                })
                .collect(),
        }
    }

    /// Evaluate at a point, in `f64`. Coefficients here are small integers
    /// over unit denominators, so `to_f64` is exact in practice.
    pub fn eval_f64(&self, point: &[f64; V]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = c.to_f64().expect("rational representable");
            for i in 0..V {
                term *= point[i].powi(e[i] as i32);
            }
            acc += term;
        }
        acc
    }

    /// Iterate `(exponents, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16; V], &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest exponent of variable `index` across all terms.
    pub fn degree(&self, index: usize) -> u16 {
        self.terms.keys().map(|e| e[index]).max().unwrap_or(0)
    }

    /// All coefficients are integers (denominator 1).
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    /// Infinity norm of the coefficients, as f64 (for conditioning checks).
    pub fn coeff_max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}
