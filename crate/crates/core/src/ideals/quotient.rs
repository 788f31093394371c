use std::collections::HashMap;

use crate::poly::{Field, Monomial, Poly};

use super::{GroebnerBasis, IdealError};

/// The finite-dimensional algebra `K[x] / I` of a zero-dimensional ideal,
/// with the standard monomials as its linear basis.
#[derive(Clone, Debug)]
pub struct QuotientRing<K: Field> {
    gb: GroebnerBasis<K>,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl<K: Field> QuotientRing<K> {
    /// Enumerates the monomials outside the leading-term ideal, ascending in
    /// the basis' term order.
    pub fn new(gb: GroebnerBasis<K>) -> Result<Self, IdealError> {
        if !gb.is_zero_dimensional() {
            return Err(IdealError::NotZeroDimensional);
        }
        let n = gb.nvars();
        let lms = gb.leading_monomials();
        let mut monomials = Vec::new();
        if !gb.is_unit() {
            let bounds: Vec<u32> = (0..n)
                .map(|v| {
                    lms.iter()
                        .filter_map(|m| m.pure_power().filter(|(i, _)| *i == v).map(|(_, e)| e))
                        .min()
                        .expect("zero-dimensional")
                })
                .collect();
            let mut cur = vec![0u32; n];
            loop {
                let m = Monomial::from_exponents(cur.clone());
                if !lms.iter().any(|l| l.divides(&m)) {
                    monomials.push(m);
                }
                // odometer over the box below the pure powers
                let mut pos = 0;
                while pos < n {
                    cur[pos] += 1;
                    if cur[pos] < bounds[pos] {
                        break;
                    }
                    cur[pos] = 0;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
        }
        let order = gb.order().clone();
        monomials.sort_by(|a, b| order.cmp(a, b));
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(QuotientRing { gb, monomials, index })
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis<K> {
        &self.gb
    }

    pub fn standard_monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Linear dimension of the quotient.
    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    /// Coordinates of the normal form of `p` in the standard-monomial basis.
    pub fn coordinates(&self, p: &Poly<K>) -> Result<Vec<K>, IdealError> {
        let r = self.gb.normal_form(p)?;
        let mut out = vec![K::zero(); self.dimension()];
        for (m, c) in r.terms() {
            out[self.index[m]] = c.clone();
        }
        Ok(out)
    }

    /// Matrix of multiplication by `p`: column `j` holds the coordinates of
    /// `p * b_j`.
    pub fn multiplication_matrix(&self, p: &Poly<K>) -> Result<Vec<Vec<K>>, IdealError> {
        let r = self.gb.normal_form(p)?;
        let d = self.dimension();
        let mut mat = vec![vec![K::zero(); d]; d];
        for (j, b) in self.monomials.iter().enumerate() {
            let col = self.coordinates(&r.mul_monomial(b, &K::one()))?;
            for (i, c) in col.into_iter().enumerate() {
                mat[i][j] = c;
            }
        }
        Ok(mat)
    }

    /// Trace of multiplication by `p`, computed from the diagonal only.
    pub fn trace(&self, p: &Poly<K>) -> Result<K, IdealError> {
        let r = self.gb.normal_form(p)?;
        let mut acc = K::zero();
        for b in &self.monomials {
            let nf = self.gb.normal_form(&r.mul_monomial(b, &K::one()))?;
            acc = acc.add(&nf.coefficient(b));
        }
        Ok(acc)
    }
}

impl<K: Field> GroebnerBasis<K> {
    pub fn standard_monomials(&self) -> Result<QuotientRing<K>, IdealError> {
        QuotientRing::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{buchberger, Ideal};
    use crate::poly::{rat, Polynomial, TermOrder};
    use crate::text::parse_polynomial_in;

    fn p(s: &str) -> Polynomial {
        parse_polynomial_in(s, 2, 'x').unwrap()
    }

    fn ring(gens: &[&str], order: TermOrder) -> QuotientRing<crate::poly::Rational> {
        let i = Ideal::new(gens.iter().map(|g| p(g)).collect()).unwrap();
        QuotientRing::new(buchberger(&i, &order).unwrap()).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e.to_vec())
    }

    #[test]
    fn staircases() {
        let q = ring(&["x1^2", "x2^3"], TermOrder::grevlex(2));
        assert_eq!(q.dimension(), 6);
        let mut got = q.standard_monomials().to_vec();
        got.sort();
        let mut want: Vec<_> = [[0, 0], [1, 0], [0, 1], [1, 1], [0, 2], [1, 2]].iter().map(|e| mono(e)).collect();
        want.sort();
        assert_eq!(got, want);
        let q = ring(&["x2^2", "x1^2 - x2"], TermOrder::lex(2));
        assert_eq!(q.standard_monomials(), &[mono(&[0, 0]), mono(&[0, 1]), mono(&[1, 0]), mono(&[1, 1])]);
        assert_eq!(ring(&["x1", "x2"], TermOrder::grevlex(2)).dimension(), 1);
    }

    #[test]
    fn positive_dimensional_is_rejected() {
        let i = Ideal::new(vec![p("x2")]).unwrap();
        let gb = buchberger(&i, &TermOrder::grevlex(2)).unwrap();
        assert!(matches!(QuotientRing::new(gb), Err(IdealError::NotZeroDimensional)));
    }

    #[test]
    fn multiplication_matrices() {
        let q = ring(&["x1", "x2"], TermOrder::grevlex(2));
        assert_eq!(q.multiplication_matrix(&p("5")).unwrap(), vec![vec![rat(5)]]);
        let q = ring(&["x2^2", "x1^2 - x2"], TermOrder::lex(2));
        let m = q.multiplication_matrix(&p("x1")).unwrap();
        // basis order: 1, x2, x1, x1*x2; 1 -> x1, x1 -> x2, x2 -> x1*x2, x1*x2 -> 0
        let z = rat(0);
        let o = rat(1);
        let want = vec![
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), o.clone(), z.clone()],
            vec![o.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), o.clone(), z.clone(), z.clone()],
        ];
        assert_eq!(m, want);
        assert_eq!(q.trace(&p("x1")).unwrap(), rat(0));
        assert_eq!(q.trace(&p("1")).unwrap(), rat(4));
    }
}
