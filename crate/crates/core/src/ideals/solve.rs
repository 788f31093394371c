use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::poly::{check_degree, monomials_up_to, Monomial, Polynomial, Rational};

use super::IdealError;

/// One equation `Σ_u coefficients[u] · c_u = rhs` in unknown polynomials `c_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEquation {
    pub coefficients: Vec<Polynomial>,
    pub rhs: Polynomial,
}

/// A system of polynomial identities, linear in `unknowns` unknown polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub nvars: usize,
    pub unknowns: usize,
    pub equations: Vec<LinearEquation>,
}

impl LinearSystem {
    pub fn new(nvars: usize, unknowns: usize) -> Self {
        LinearSystem { nvars, unknowns, equations: Vec::new() }
    }

    pub fn push(&mut self, coefficients: Vec<Polynomial>, rhs: Polynomial) {
        assert_eq!(coefficients.len(), self.unknowns, "one coefficient per unknown");
        self.equations.push(LinearEquation { coefficients, rhs });
    }

    /// Whether `solution` satisfies every equation exactly.
    pub fn is_solution(&self, solution: &[Polynomial]) -> bool {
        self.equations.iter().all(|e| {
            let lhs = e
                .coefficients
                .iter()
                .zip(solution)
                .fold(Polynomial::zero(self.nvars), |acc, (a, c)| &acc + &(a * c));
            lhs == e.rhs
        })
    }
}

type Row = BTreeMap<usize, Rational>;

/// Finds unknowns of total degree at most `degree_bound` satisfying the
/// system, or `None` when no such solution exists at this bound.
///
/// Each unknown is expanded over all monomials up to the bound and the
/// resulting rational system is solved by sparse elimination. Columns are
/// ordered by degree first, so the free columns are the high-degree ones;
/// setting them to zero gives a solution of small degree.
pub fn truncated_linear_solve(
    system: &LinearSystem,
    degree_bound: u32,
) -> Result<Option<Vec<Polynomial>>, IdealError> {
    let n = system.nvars;
    for e in &system.equations {
        if e.coefficients.iter().chain(std::iter::once(&e.rhs)).any(|p| p.nvars() != n) {
            return Err(IdealError::DimensionMismatch { left: n, right: e.rhs.nvars() });
        }
        let top = e.coefficients.iter().filter_map(|c| c.total_degree()).max().unwrap_or(0);
        check_degree(top + degree_bound)?;
    }
    let basis = monomials_up_to(n, degree_bound);
    // column = (position in basis) * unknowns + unknown; basis is sorted by degree
    let ncols = basis.len() * system.unknowns;
    let col_of = |pos: usize, u: usize| pos * system.unknowns + u;

    let mut pivots: BTreeMap<usize, (Row, Rational)> = BTreeMap::new();
    for e in &system.equations {
        let mut rows: HashMap<Monomial, Row> = HashMap::new();
        let mut rhs: HashMap<Monomial, Rational> = HashMap::new();
        for (u, a) in e.coefficients.iter().enumerate() {
            for (am, ac) in a.terms() {
                for (pos, m) in basis.iter().enumerate() {
                    let target = am.mul(m);
                    let entry = rows.entry(target).or_default().entry(col_of(pos, u)).or_insert_with(Rational::zero);
                    *entry += ac;
                }
            }
        }
        for (m, c) in e.rhs.terms() {
            rhs.insert(m.clone(), c.clone());
            rows.entry(m.clone()).or_default();
        }
        let mut keys: Vec<Monomial> = rows.keys().cloned().collect();
        keys.sort();
        for m in keys {
            let mut row = rows.remove(&m).expect("present");
            row.retain(|_, v| !v.is_zero());
            let b = rhs.remove(&m).unwrap_or_else(Rational::zero);
            if !insert_row(&mut pivots, row, b) {
                return Ok(None);
            }
        }
    }

    let mut values = vec![Rational::zero(); ncols];
    for (&c, (row, b)) in pivots.iter().rev() {
        let mut v = b.clone();
        for (&j, a) in row.range(c + 1..) {
            v -= a * &values[j];
        }
        values[c] = v;
    }
    let mut out = vec![Polynomial::zero(n); system.unknowns];
    for (pos, m) in basis.iter().enumerate() {
        for (u, poly) in out.iter_mut().enumerate() {
            let v = &values[col_of(pos, u)];
            if !v.is_zero() {
                *poly = &*poly + &Polynomial::monomial(m.clone(), v.clone());
            }
        }
    }
    debug_assert!(system.is_solution(&out));
    Ok(Some(out))
}

/// Reduces `row` against the pivots and installs it; `false` if the system
/// becomes inconsistent.
fn insert_row(pivots: &mut BTreeMap<usize, (Row, Rational)>, mut row: Row, mut b: Rational) -> bool {
    loop {
        let Some((&c, _)) = row.iter().next() else {
            return b.is_zero();
        };
        match pivots.get(&c) {
            Some((prow, pb)) => {
                let f = row[&c].clone();
                for (j, a) in prow {
                    let entry = row.entry(*j).or_insert_with(Rational::zero);
                    *entry -= &f * a;
                    if entry.is_zero() {
                        row.remove(j);
                    }
                }
                b -= &f * pb;
            }
            None => {
                let inv = Rational::one() / &row[&c];
                for v in row.values_mut() {
                    *v *= &inv;
                }
                b *= &inv;
                pivots.insert(c, (row, b));
                return true;
            }
        }
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
    fn exact_division_case() {
        let mut s = LinearSystem::new(2, 1);
        s.push(vec![p("x1")], p("3*x1^2"));
        assert_eq!(truncated_linear_solve(&s, 1).unwrap(), Some(vec![p("3*x1")]));
    }

    #[test]
    fn no_solution_case() {
        let mut s = LinearSystem::new(2, 1);
        s.push(vec![p("x1")], p("x2"));
        assert_eq!(truncated_linear_solve(&s, 10).unwrap(), None);
    }

    #[test]
    fn underdetermined_case() {
        let mut s = LinearSystem::new(2, 2);
        s.push(vec![p("x1"), p("x2")], p("x1^2 + x1*x2"));
        let sol = truncated_linear_solve(&s, 1).unwrap().unwrap();
        assert!(s.is_solution(&sol));
        assert!(sol.iter().all(|c| c.total_degree().unwrap_or(0) <= 1));
    }

    #[test]
    fn bound_too_small() {
        let mut s = LinearSystem::new(2, 1);
        s.push(vec![p("x1")], p("x1^3"));
        assert_eq!(truncated_linear_solve(&s, 1).unwrap(), None);
        assert_eq!(truncated_linear_solve(&s, 2).unwrap(), Some(vec![p("x1^2")]));
    }
}
