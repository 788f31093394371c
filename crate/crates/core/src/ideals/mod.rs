//! Polynomial ideals: Gröbner bases, quotient rings, finiteness tests and
//! degree-truncated linear solving.

mod groebner;
mod quotient;
mod solve;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Field, Fp, OrderKind, Poly, PolyError, Rational, TermOrder};

pub use groebner::{buchberger, buchberger_cancellable, GroebnerBasis};
pub use quotient::QuotientRing;
pub use solve::{truncated_linear_solve, LinearEquation, LinearSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("an ideal needs at least one generator")]
    NoGenerators,
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("total degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("computation cancelled")]
    Cancelled,
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("generator {index} does not vanish at the origin")]
    NotVanishingAtOrigin { index: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Cooperative cancellation flag, checked between S-pair reductions.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// A finitely generated ideal in `K[x1..xn]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ideal<K: Field = Rational> {
    nvars: usize,
    generators: Vec<Poly<K>>,
}

impl<K: Field> Ideal<K> {
    pub fn new(generators: Vec<Poly<K>>) -> Result<Self, IdealError> {
        let first = generators.first().ok_or(IdealError::NoGenerators)?;
        let nvars = first.nvars();
        if let Some(bad) = generators.iter().find(|g| g.nvars() != nvars) {
            return Err(IdealError::DimensionMismatch { left: nvars, right: bad.nvars() });
        }
        Ok(Ideal { nvars, generators })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly<K>] {
        &self.generators
    }

    pub fn groebner(&self, order: &TermOrder) -> Result<GroebnerBasis<K>, IdealError> {
        buchberger(self, order)
    }
}

impl Ideal {
    /// Whether the ideal is the whole ring.
    pub fn contains_one(&self) -> Result<bool, IdealError> {
        Ok(self.groebner(&TermOrder::grevlex(self.nvars))?.is_unit())
    }

    /// Whether the origin is an isolated point of the zero set.
    ///
    /// A zero-dimensional ideal passes at once. Otherwise the origin is
    /// isolated iff for every variable `x_i` the saturation `I : x_i^∞`
    /// (the closure of the zero set off `{x_i = 0}`) misses the origin.
    ///
    /// The question is first settled modulo [`Fp::MODULUS`] when possible:
    /// fiber dimension is upper semicontinuous, so an origin isolated in
    /// characteristic `p` is isolated in characteristic zero. Only a
    /// negative answer there falls through to the exact computation.
    pub fn origin_is_isolated_zero(&self) -> Result<bool, IdealError> {
        self.origin_is_isolated_zero_with(&CancelToken::new())
    }

    pub fn origin_is_isolated_zero_with(&self, cancel: &CancelToken) -> Result<bool, IdealError> {
        if self.origin_certainly_isolated(cancel)? {
            return Ok(true);
        }
        self.isolated_by_saturation(cancel)
    }

    /// The sufficient test run modulo a prime; `false` decides nothing.
    pub fn origin_certainly_isolated(&self, cancel: &CancelToken) -> Result<bool, IdealError> {
        self.check_vanishing()?;
        match self.modulo_prime() {
            Some(reduced) => reduced.isolated_by_saturation(cancel),
            None => Ok(false),
        }
    }

    /// The generators reduced modulo [`Fp::MODULUS`], unless a denominator
    /// is divisible by it.
    pub fn modulo_prime(&self) -> Option<Ideal<Fp>> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let terms = g.terms().map(|(m, c)| Fp::from_rational(c).map(|c| (m.clone(), c)));
                terms.collect::<Option<Vec<_>>>().map(|t| Poly::from_terms(self.nvars, t))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Ideal { nvars: self.nvars, generators: gens })
    }
}

impl<K: Field> Ideal<K> {
    fn check_vanishing(&self) -> Result<(), IdealError> {
        match self.generators.iter().position(|g| !Field::is_zero(&g.constant_term())) {
            Some(index) => Err(IdealError::NotVanishingAtOrigin { index }),
            None => Ok(()),
        }
    }

    fn isolated_by_saturation(&self, cancel: &CancelToken) -> Result<bool, IdealError> {
        self.check_vanishing()?;
        let gb = buchberger_cancellable(self, &TermOrder::grevlex(self.nvars), cancel)?;
        if gb.is_zero_dimensional() {
            return Ok(true);
        }
        for var in 0..self.nvars {
            let sat = self.saturation_by_variable(var, cancel)?;
            if sat.iter().all(|p| Field::is_zero(&p.constant_term())) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Generators of `I : x_var^∞`, by eliminating `t` from `I + ⟨1 - t x_var⟩`.
    pub fn saturation_by_variable(&self, var: usize, cancel: &CancelToken) -> Result<Vec<Poly<K>>, IdealError> {
        let n = self.nvars;
        let embed: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Poly<K>> = self.generators.iter().map(|g| g.remap_variables(n + 1, &embed)).collect();
        let t = Poly::<K>::var(n + 1, n);
        let x = Poly::<K>::var(n + 1, var);
        gens.push(&Poly::<K>::one(n + 1) - &(&t * &x));
        let perm: Vec<usize> = std::iter::once(n).chain(0..n).collect();
        let order = TermOrder::with_permutation(OrderKind::Block(1), perm);
        let gb = buchberger_cancellable(&Ideal::new(gens)?, &order, cancel)?;
        let back: Vec<usize> = (0..n).collect();
        Ok(gb
            .basis()
            .iter()
            .filter(|p| !p.involves(n))
            .map(|p| project(p, n, &back))
            .collect())
    }
}

/// Drops the trailing (absent) variable of a polynomial in `n + 1` variables.
fn project<K: Field>(p: &Poly<K>, n: usize, keep: &[usize]) -> Poly<K> {
    Poly::from_terms(
        n,
        p.terms().map(|(m, c)| {
            let e = keep.iter().map(|&i| m.exponent(i)).collect();
            (crate::poly::Monomial::from_exponents(e), c.clone())
        }),
    )
}
