//! Dense univariate polynomials over the rationals, used by the coprimality
//! certificate in the multivariate gcd.

use super::field::{Field, Rational};

/// Coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Dense(pub Vec<Rational>);

impl Dense {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Dense(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn rem(&self, d: &Dense) -> Dense {
        let dd = d.degree().expect("nonzero divisor");
        let lc = d.0[dd].clone();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = r[k].div(&lc);
            let shift = k - dd;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] = r[shift + i].sub(&q.mul(c));
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        Dense(r)
    }

    /// Degree of the monic gcd.
    pub fn gcd_degree(a: &Dense, b: &Dense) -> usize {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = make_monic(r);
        }
        a.degree().unwrap_or(0)
    }
}

fn make_monic(p: Dense) -> Dense {
    match p.0.last() {
        Some(lc) => {
            let lc = lc.clone();
            Dense(p.0.iter().map(|c| c.div(&lc)).collect())
        }
        None => p,
    }
}
