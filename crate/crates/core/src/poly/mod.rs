//! Exact sparse multivariate polynomials.
//!
//! [`Poly`] is generic over a coefficient [`Field`]; [`Polynomial`] is the
//! rational case used throughout the geometry. Variables are indexed from 0
//! in the API and printed from 1 (`x1`, `x2`, ...).

mod field;
mod gcd;
mod monomial;
mod univariate;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use thiserror::Error;

pub use field::{rat, ratio, Field, Fp, Rational};
pub use gcd::certainly_coprime;
pub use monomial::{monomials_up_to, Monomial, OrderKind, TermOrder};

/// Rational multivariate polynomials.
pub type Polynomial = Poly<Rational>;

pub const DEFAULT_DEGREE_CAP: u32 = 64;

static DEGREE_CAP: AtomicU32 = AtomicU32::new(DEFAULT_DEGREE_CAP);

/// Total degree bound enforced by composition, powers and Gröbner steps.
pub fn degree_cap() -> u32 {
    DEGREE_CAP.load(AtomicOrdering::Relaxed)
}

/// Sets the process-wide degree bound. Intended to be called once at startup.
pub fn set_degree_cap(cap: u32) {
    DEGREE_CAP.store(cap, AtomicOrdering::Relaxed);
}

pub(crate) fn check_degree(degree: u32) -> Result<(), PolyError> {
    let cap = degree_cap();
    if degree > cap {
        Err(PolyError::DegreeOverflow { degree, cap })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division is not exact")]
    DivisionNotExact,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("total degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials")]
    BothZero,
}

/// Sparse polynomial: a map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<K> {
    nvars: usize,
    terms: BTreeMap<Monomial, K>,
}

impl<K: Field> Poly<K> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The variable `x_{var+1}`. Panics if `var >= nvars`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable {var} out of range");
        Self::monomial(Monomial::var_power(nvars, var, 1), K::one())
    }

    pub fn monomial(m: Monomial, c: K) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms; zero sums are dropped.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, K)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &K)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        self.coefficient(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in a single variable; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    pub fn leading_term(&self, order: &TermOrder) -> Option<(&Monomial, &K)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch { left: self.nvars, right: other.nvars })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.mul(c))).collect(),
        }
    }

    /// `self^e`, subject to the degree cap.
    pub fn pow(&self, e: u32) -> Result<Self, PolyError> {
        if let Some(d) = self.total_degree() {
            check_degree(d.saturating_mul(e))?;
        }
        Ok(self.pow_uncapped(e))
    }

    pub(crate) fn pow_uncapped(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exponents_mut()[var] -= 1;
            out.add_term(dm, &c.mul(&K::from_integer(e as i64)));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars)
            .map(|i| self.partial_derivative(i).expect("index in range"))
            .collect()
    }

    pub fn evaluate(&self, point: &[K]) -> K {
        assert_eq!(point.len(), self.nvars, "point arity mismatch");
        let mut acc = K::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = t.mul(x);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share one
    /// ambient dimension, which becomes the result's.
    pub fn compose(&self, subs: &[Poly<K>]) -> Result<Self, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { left: self.nvars, right: subs.len() });
        }
        let target = match subs.first() {
            Some(s) => s.nvars,
            None => return Ok(Poly::constant(0, self.constant_term())),
        };
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(PolyError::DimensionMismatch { left: target, right: bad.nvars });
        }
        let sub_degrees: Vec<u32> = subs.iter().map(|s| s.total_degree().unwrap_or(0)).collect();
        if let Some(bound) = self
            .terms
            .keys()
            .map(|m| m.exponents().iter().zip(&sub_degrees).map(|(e, d)| e * d).sum::<u32>())
            .max()
        {
            check_degree(bound)?;
        }
        // powers[i][e] = subs[i]^e, built lazily
        let mut powers: Vec<Vec<Poly<K>>> = subs.iter().map(|_| vec![Poly::one(target)]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("nonempty") * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, &tc);
            }
        }
        Ok(out)
    }

    /// Minimal total degree of a term: the order of vanishing at the origin.
    pub fn vanishing_order(&self) -> Result<u32, PolyError> {
        self.terms.keys().map(Monomial::degree).min().ok_or(PolyError::ZeroPolynomial)
    }

    /// Replaces `x_var` by `x_var^n`.
    pub fn power_substitute(&self, var: usize, n: u32) -> Result<Self, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange { index: var, nvars: self.nvars });
        }
        assert!(n >= 1, "substitution power must be positive");
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m = m.clone();
            m.exponents_mut()[var] *= n;
            (m, c.clone())
        });
        let p = Poly { nvars: self.nvars, terms: terms.collect() };
        if let Some(d) = p.total_degree() {
            check_degree(d)?;
        }
        Ok(p)
    }

    /// Exact quotient `self / divisor`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, PolyError> {
        self.check_dim(divisor)?;
        let (lm, lc) = divisor.terms.last_key_value().ok_or(PolyError::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        // the derived key order is lex, so the last key is the lex leading term
        while let Some((m, c)) = rem.terms.last_key_value() {
            let qm = lm.quotient_of(m).ok_or(PolyError::DivisionNotExact)?;
            let qc = c.div(lc);
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), &dc.mul(&qc).neg());
            }
            quot.add_term(qm, &qc);
        }
        Ok(quot)
    }

    pub fn map_coefficients<L: Field>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `mapping[i]`.
    pub fn remap_variables(&self, nvars: usize, mapping: &[usize]) -> Self {
        assert_eq!(mapping.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.exponents().iter().enumerate() {
                e[mapping[i]] += x;
            }
            out.add_term(Monomial::from_exponents(e), c);
        }
        out
    }

    /// Splits into coefficients of powers of `var`: `self = Σ c_k var^k`.
    pub(crate) fn coefficients_in(&self, var: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(self.nvars); self.degree_in(var) as usize + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, c) in &self.terms {
            let k = m.exponent(var) as usize;
            let mut m = m.clone();
            m.exponents_mut()[var] = 0;
            out[k].add_term(m, c);
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<K: Field> $tr<&Poly<K>> for &Poly<K> {
            type Output = Poly<K>;
            fn $method(self, rhs: &Poly<K>) -> Poly<K> {
                self.$checked(rhs).expect("polynomial dimension mismatch")
            }
        }
        impl<K: Field> $tr<Poly<K>> for Poly<K> {
            type Output = Poly<K>;
            fn $method(self, rhs: Poly<K>) -> Poly<K> {
                (&self).$method(&rhs)
            }
        }
        impl<K: Field> $tr<&Poly<K>> for Poly<K> {
            type Output = Poly<K>;
            fn $method(self, rhs: &Poly<K>) -> Poly<K> {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<K: Field> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
}

impl<K: Field> Neg for Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        -&self
    }
}

impl<K: Field> std::fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_polynomial_in;

    fn p(s: &str) -> Polynomial {
        parse_polynomial_in(s, 2, 'x').unwrap()
    }

    #[test]
    fn ring_operations() {
        assert_eq!(&p("x1 + x2") * &p("x1 - x2"), p("x1^2 - x2^2"));
        assert_eq!(p("x1^2*x2 + x1*x2^2").exact_div(&p("x1*x2")).unwrap(), p("x1 + x2"));
        assert_eq!(p("x1^2 + 1").exact_div(&p("x1")), Err(PolyError::DivisionNotExact));
        assert_eq!(p("x1").exact_div(&Polynomial::zero(2)), Err(PolyError::DivisionByZero));
        let q3 = Polynomial::one(3);
        assert!(matches!(p("x1").checked_add(&q3), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x1^2*x2").partial_derivative(0).unwrap(), p("2*x1*x2"));
        assert_eq!(p("x1^2 - x2^3").partial_derivative(1).unwrap(), p("-3*x2^2"));
        assert!(p("7").partial_derivative(0).unwrap().is_zero());
        assert!(matches!(p("x1").partial_derivative(2), Err(PolyError::VariableOutOfRange { .. })));
    }

    #[test]
    fn composition() {
        assert_eq!(p("x1*x2").compose(&[p("x1^2"), p("x2")]).unwrap(), p("x1^2*x2"));
        assert_eq!(p("x1").compose(&[p("x1^2 - x2^2"), p("x2")]).unwrap(), p("x1^2 - x2^2"));
        assert_eq!(p("x1^2 - x2^3").compose(&[p("x2^3"), p("x1^2")]).unwrap(), p("x2^6 - x1^6"));
        assert!(p("x1").compose(&[p("x1")]).is_err());
    }

    #[test]
    fn orders_and_substitution() {
        assert_eq!(p("x1^2*x2 + x2^5").vanishing_order().unwrap(), 3);
        assert_eq!(p("1 + x1").vanishing_order().unwrap(), 0);
        assert_eq!(p("x1^3 - 2*x1*x2^3").vanishing_order().unwrap(), 3);
        assert_eq!(Polynomial::zero(2).vanishing_order(), Err(PolyError::ZeroPolynomial));
        assert_eq!(p("x1 + x2").power_substitute(0, 3).unwrap(), p("x1^3 + x2"));
        assert_eq!(p("x1^2*x2").power_substitute(0, 2).unwrap(), p("x1^4*x2"));
        assert_eq!(p("x2^5").power_substitute(0, 7).unwrap(), p("x2^5"));
    }

    #[test]
    fn degree_cap_blocks_blowup() {
        let big = p("x1^40 + x2");
        assert!(matches!(big.compose(&[p("x1^2"), p("x2")]), Err(PolyError::DegreeOverflow { .. })));
        assert!(matches!(big.pow(2), Err(PolyError::DegreeOverflow { .. })));
    }
}
