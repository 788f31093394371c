use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial in a fixed number of variables.
///
/// The derived ordering is lexicographic with the first variable largest;
/// it is only used as the storage key of [`super::Poly`]. Leading terms
/// are always taken with respect to an explicit [`TermOrder`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The monomial `x_i^e` (0-based variable index).
    pub fn var_power(nvars: usize, var: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exp;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// If this is a pure power `x_i^e` with `e > 0`, returns `(i, e)`.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    pub(crate) fn exponents_mut(&mut self) -> &mut Vec<u32> {
        &mut self.0
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Enumerates all monomials in `nvars` variables of total degree at most `max_degree`,
/// sorted by degree and then lexicographically.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![0u32; nvars];
        fill_degree(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        fill_degree(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Graded reverse lexicographic.
    Grevlex,
    Lex,
    /// Product order: grevlex on the first `k` variables of the permutation,
    /// ties broken by grevlex on the rest. Eliminates the first block.
    Block(usize),
}

/// A monomial order given by a kind and a variable priority permutation
/// (`perm[0]` is the most significant variable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    kind: OrderKind,
    perm: Vec<usize>,
}

impl TermOrder {
    pub fn grevlex(nvars: usize) -> Self {
        TermOrder { kind: OrderKind::Grevlex, perm: (0..nvars).collect() }
    }

    pub fn lex(nvars: usize) -> Self {
        TermOrder { kind: OrderKind::Lex, perm: (0..nvars).collect() }
    }

    /// Panics if `perm` is not a permutation of `0..perm.len()`, or a block
    /// size exceeds the number of variables.
    pub fn with_permutation(kind: OrderKind, perm: Vec<usize>) -> Self {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(p < perm.len() && !seen[p], "not a permutation: {perm:?}");
            seen[p] = true;
        }
        if let OrderKind::Block(k) = kind {
            assert!(k <= perm.len(), "block size {k} exceeds {} variables", perm.len());
        }
        TermOrder { kind, perm }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn nvars(&self) -> usize {
        self.perm.len()
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.perm {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => grevlex_cmp(&self.perm, a, b),
            OrderKind::Block(k) => {
                let (first, rest) = self.perm.split_at(k);
                grevlex_cmp(first, a, b).then_with(|| grevlex_cmp(rest, a, b))
            }
        }
    }
}

impl TermOrder {
    /// A vector whose lexicographic order agrees with [`TermOrder::cmp`].
    /// It is additive: `key(a * b) = key(a) + key(b)` componentwise.
    pub(crate) fn sort_key(&self, m: &Monomial) -> Vec<i64> {
        fn grevlex_key(vars: &[usize], m: &Monomial, out: &mut Vec<i64>) {
            out.push(vars.iter().map(|&v| m.0[v] as i64).sum());
            out.extend(vars.iter().rev().map(|&v| -(m.0[v] as i64)));
        }
        let mut out = Vec::with_capacity(self.perm.len() + 2);
        match self.kind {
            OrderKind::Lex => out.extend(self.perm.iter().map(|&v| m.0[v] as i64)),
            OrderKind::Grevlex => grevlex_key(&self.perm, m, &mut out),
            OrderKind::Block(k) => {
                let (first, rest) = self.perm.split_at(k);
                grevlex_key(first, m, &mut out);
                grevlex_key(rest, m, &mut out);
            }
        }
        out
    }
}

fn grevlex_cmp(vars: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = vars.iter().map(|&v| a.0[v]).sum();
    let db: u32 = vars.iter().map(|&v| b.0[v]).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for &v in vars.iter().rev() {
        match a.0[v].cmp(&b.0[v]) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e.to_vec())
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let o = TermOrder::grevlex(3);
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        // x1*x3 < x2^2 in grevlex
        assert_eq!(o.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[0, 0, 3]), &m(&[2, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn lex_and_permutation() {
        let o = TermOrder::lex(2);
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 5])), Ordering::Greater);
        let o = TermOrder::with_permutation(OrderKind::Lex, vec![1, 0]);
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 5])), Ordering::Less);
    }

    #[test]
    fn block_order_eliminates_first_block() {
        let o = TermOrder::with_permutation(OrderKind::Block(1), vec![2, 0, 1]);
        assert_eq!(o.cmp(&m(&[0, 0, 1]), &m(&[9, 9, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[2, 0, 1]), &m(&[0, 1, 1])), Ordering::Greater);
    }

    #[test]
    fn sort_keys_agree_with_comparison() {
        let ms = monomials_up_to(3, 3);
        let orders = [
            TermOrder::grevlex(3),
            TermOrder::lex(3),
            TermOrder::with_permutation(OrderKind::Block(1), vec![2, 0, 1]),
            TermOrder::with_permutation(OrderKind::Grevlex, vec![1, 2, 0]),
        ];
        for o in &orders {
            for a in &ms {
                for b in &ms {
                    assert_eq!(o.sort_key(a).cmp(&o.sort_key(b)), o.cmp(a, b));
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(monomials_up_to(2, 3).len(), 10);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(0, 4).len(), 1);
    }
}
