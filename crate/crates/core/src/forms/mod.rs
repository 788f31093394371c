//! Differential forms with polynomial coefficients.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::{PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected a {expected}-form, found a {found}-form")]
    WrongDegree { expected: usize, found: usize },
    #[error("operation undefined for the zero form")]
    ZeroForm,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A `k`-form `Σ f_I dx_I` over `n` variables.
///
/// Index tuples are strictly increasing, 0-based, and only nonzero
/// coefficients are stored. A zero form keeps its degree tag, which may
/// exceed `n` when it comes from a wedge or derivative that overflowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DifferentialForm {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Polynomial>,
}

/// Sign of the permutation sorting the concatenation `a ++ b` of two
/// increasing disjoint index lists; `None` if they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            merged.push(a[i]);
            i += 1;
        } else if i < a.len() && a[i] == b[j] {
            return None;
        } else {
            inversions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        }
    }
    Some((merged, inversions % 2 == 1))
}

impl DifferentialForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        DifferentialForm { nvars, degree, terms: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn function(f: Polynomial) -> Self {
        let mut out = Self::zero(f.nvars(), 0);
        out.insert(Vec::new(), f);
        out
    }

    /// `dx_{var+1}`.
    pub fn differential(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable {var} out of range");
        let mut out = Self::zero(nvars, 1);
        out.insert(vec![var], Polynomial::one(nvars));
        out
    }

    /// `Σ coeffs[i] dx_i`.
    pub fn one_form(coeffs: Vec<Polynomial>) -> Self {
        let n = coeffs.len();
        let mut out = Self::zero(n, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            assert_eq!(c.nvars(), n, "coefficient arity mismatch");
            out.insert(vec![i], c);
        }
        out
    }

    /// Builds a form from `(index tuple, coefficient)` pairs. Tuples need not
    /// be sorted; unsorted tuples are sorted with the matching sign and
    /// tuples with a repeated index are dropped.
    pub fn from_terms(
        nvars: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Polynomial)>,
    ) -> Self {
        let mut out = Self::zero(nvars, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "index tuple length must equal degree");
            assert!(idx.iter().all(|&i| i < nvars), "index out of range");
            let mut sorted = Vec::new();
            let mut negate = false;
            let mut ok = true;
            for &i in &idx {
                match merge_sign(&sorted, &[i]) {
                    Some((m, s)) => {
                        sorted = m;
                        negate ^= s;
                    }
                    None => ok = false,
                }
            }
            if ok {
                out.add_term(sorted, if negate { -c } else { c });
            }
        }
        out
    }

    fn insert(&mut self, idx: Vec<usize>, c: Polynomial) {
        if !c.is_zero() {
            self.terms.insert(idx, c);
        }
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&idx) {
            Some(old) => {
                let s = &old + &c;
                self.insert(idx, s);
            }
            None => self.insert(idx, c),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Polynomial)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, idx: &[usize]) -> Polynomial {
        self.terms.get(idx).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    /// Coefficients `a_i` of a 1-form `Σ a_i dx_i`.
    pub fn one_form_coefficients(&self) -> Result<Vec<Polynomial>, FormError> {
        self.expect_degree(1)?;
        Ok((0..self.nvars).map(|i| self.coefficient(&[i])).collect())
    }

    fn expect_degree(&self, k: usize) -> Result<(), FormError> {
        if self.degree == k {
            Ok(())
        } else {
            Err(FormError::WrongDegree { expected: k, found: self.degree })
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), FormError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(FormError::DimensionMismatch { left: self.nvars, right: other.nvars })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        self.check_dim(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(FormError::WrongDegree { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, f: &Polynomial) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v * f);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((idx, negate)) = merge_sign(ia, ib) {
                    let c = ca * cb;
                    out.add_term(idx, if negate { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.degree + 1);
        for (idx, c) in &self.terms {
            for j in 0..self.nvars {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.partial_derivative(j).expect("index in range");
                if dc.is_zero() {
                    continue;
                }
                let (merged, negate) = merge_sign(&[j], idx).expect("j not in idx");
                out.add_term(merged, if negate { -dc } else { dc });
            }
        }
        out
    }

    /// Pullback along the polynomial map with components `map` (one per
    /// variable of this form, all over a common source dimension).
    pub fn pullback(&self, map: &[Polynomial]) -> Result<Self, FormError> {
        if map.len() != self.nvars {
            return Err(FormError::DimensionMismatch { left: self.nvars, right: map.len() });
        }
        let source = map.first().map(Polynomial::nvars).unwrap_or(0);
        let differentials: Vec<DifferentialForm> = map
            .iter()
            .map(|g| {
                if g.nvars() != source {
                    return Err(FormError::DimensionMismatch { left: source, right: g.nvars() });
                }
                Ok(DifferentialForm::function(g.clone()).exterior_derivative())
            })
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(source, self.degree);
        for (idx, c) in &self.terms {
            let coeff = c.compose(map)?;
            let mut piece = DifferentialForm::function(coeff);
            for &i in idx {
                piece = piece.wedge(&differentials[i])?;
                if piece.is_zero() {
                    break;
                }
            }
            out = out.add(&piece)?;
        }
        if out.is_zero() {
            out.degree = self.degree;
        }
        Ok(out)
    }

    /// Gcd of all coefficients (canonical associate).
    pub fn coefficient_gcd(&self) -> Result<Polynomial, FormError> {
        if self.is_zero() {
            return Err(FormError::ZeroForm);
        }
        Ok(Polynomial::gcd_all(self.terms.values())?)
    }

    /// Divides out the gcd of the coefficients; returns `(form / removed, removed)`.
    pub fn primitive_part(&self) -> Result<(Self, Polynomial), FormError> {
        let removed = self.coefficient_gcd()?;
        let mut out = Self::zero(self.nvars, self.degree);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.exact_div(&removed)?);
        }
        Ok((out, removed))
    }

    /// Rescales by a rational constant so that the coefficients are integral
    /// with content 1 and the first coefficient has a positive leading term.
    pub fn canonical(&self) -> Self {
        let Some((_, first)) = self.terms.iter().next() else {
            return self.clone();
        };
        let mut joint = Polynomial::zero(self.nvars + 1);
        let sign_unit = first.normalizing_unit().expect("nonzero coefficient");
        // stack coefficients into one polynomial to share a single content
        for (slot, (_, c)) in self.terms.iter().enumerate() {
            let lifted = c.remap_variables(self.nvars + 1, &(0..self.nvars).collect::<Vec<_>>());
            let tag = Polynomial::var(self.nvars + 1, self.nvars).pow_uncapped(slot as u32);
            joint = &joint + &(&lifted * &tag);
        }
        let mut unit = joint.normalizing_unit().expect("nonzero");
        use num_traits::Signed;
        if sign_unit.is_negative() != unit.is_negative() {
            unit = -unit;
        }
        let mut out = Self::zero(self.nvars, self.degree);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.scale(&unit));
        }
        out
    }

    /// `ω ∧ dω = 0` for a 1-form.
    pub fn is_integrable(&self) -> Result<bool, FormError> {
        self.expect_degree(1)?;
        Ok(self.wedge(&self.exterior_derivative())?.is_zero())
    }

    /// For a nonzero 1-form: the coefficients have no nonconstant common factor.
    pub fn zero_locus_codim_ge_2(&self) -> Result<bool, FormError> {
        self.expect_degree(1)?;
        Ok(self.coefficient_gcd()?.is_constant())
    }

    /// Whether every coefficient vanishes at the origin.
    pub fn vanishes_at_origin(&self) -> bool {
        self.terms.values().all(|c| crate::poly::Field::is_zero(&c.constant_term()))
    }
}

impl std::fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::text::format_form(self, 'x'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_form_in, parse_polynomial_in};

    fn f(s: &str, n: usize) -> DifferentialForm {
        parse_form_in(s, n, 'x').unwrap()
    }

    fn p(s: &str, n: usize) -> Polynomial {
        parse_polynomial_in(s, n, 'x').unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert!(f("dx1", 2).wedge(&f("dx1", 2)).unwrap().is_zero());
        assert_eq!(f("x1 dx1 + x2 dx2", 2).wedge(&f("dx2", 2)).unwrap(), f("x1 dx1^dx2", 2));
        let lhs = f("x3 dx1 + dx2", 3).wedge(&f("dx3^dx1", 3)).unwrap();
        assert_eq!(lhs, f("dx1^dx2^dx3", 3));
    }

    #[test]
    fn derivative_examples() {
        let d = DifferentialForm::function(p("x1^2*x2", 2)).exterior_derivative();
        assert_eq!(d, f("2*x1*x2 dx1 + x1^2 dx2", 2));
        assert!(d.exterior_derivative().is_zero());
        assert_eq!(f("x3 dx1 + dx2", 3).exterior_derivative(), f("-dx1^dx3", 3));
    }

    #[test]
    fn pullback_examples() {
        let remark = f("dx1", 2).pullback(&[p("x1^2 - x2^2", 2), p("x2", 2)]).unwrap();
        assert_eq!(remark, f("2*x1 dx1 - 2*x2 dx2", 2));
        let id = f("dx1", 2).pullback(&[p("x1", 2), p("x2", 2)]).unwrap();
        assert_eq!(id, f("dx1", 2));
        let pb = f("x2 dx1", 2).pullback(&[p("x1^2", 2), p("x2", 2)]).unwrap();
        assert_eq!(pb, f("2*x1*x2 dx1", 2));
    }

    #[test]
    fn primitive_part_examples() {
        let (form, removed) = f("2*x1 dx1", 2).primitive_part().unwrap();
        assert_eq!(removed, p("x1", 2));
        assert_eq!(form, f("2 dx1", 2));
        let (form, removed) = f("2*x1 dx1 - 2*x2 dx2", 2).primitive_part().unwrap();
        assert!(removed.is_nonzero_constant());
        assert_eq!(form.canonical(), f("x1 dx1 - x2 dx2", 2));
        let (form, removed) = f("x1^2*x2 dx1 + x1*x2^2 dx2", 2).primitive_part().unwrap();
        assert_eq!((form, removed), (f("x1 dx1 + x2 dx2", 2), p("x1*x2", 2)));
        assert_eq!(DifferentialForm::zero(2, 1).primitive_part(), Err(FormError::ZeroForm));
    }

    #[test]
    fn integrability_examples() {
        assert!(f("x2^3 dx1 + (x1 + 7) dx2", 2).is_integrable().unwrap());
        assert!(!f("x3 dx1 + dx2", 3).is_integrable().unwrap());
        let exact = DifferentialForm::function(p("x1*x2*x3", 3)).exterior_derivative();
        assert!(exact.is_integrable().unwrap());
        assert!(matches!(f("dx1^dx2", 2).is_integrable(), Err(FormError::WrongDegree { .. })));
    }

    #[test]
    fn codimension_examples() {
        assert!(f("x1 dx1 + x2 dx2", 2).zero_locus_codim_ge_2().unwrap());
        assert!(!f("x1 dx1 + x1*x2 dx2", 2).zero_locus_codim_ge_2().unwrap());
        assert!(f("2*x1 dx1 - 3*x2^2 dx2", 2).zero_locus_codim_ge_2().unwrap());
        assert_eq!(DifferentialForm::zero(2, 1).zero_locus_codim_ge_2(), Err(FormError::ZeroForm));
    }

    #[test]
    fn canonical_scaling() {
        assert_eq!(f("-4*x1 dx1 + 2 dx2", 2).canonical(), f("2*x1 dx1 - dx2", 2));
        assert_eq!(f("1/2 dx2", 2).canonical(), f("dx2", 2));
    }
}
