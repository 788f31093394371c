use crate::poly::{degree_cap, Field, Monomial, Poly, TermOrder};

use super::{CancelToken, Ideal, IdealError};

#[derive(Clone, Debug)]
struct Term<K> {
    key: Vec<i64>,
    mono: Monomial,
    coef: K,
}

/// Polynomial with terms sorted ascending in the term order; the leading
/// term is last.
#[derive(Clone, Debug)]
pub(super) struct Ordered<K> {
    terms: Vec<Term<K>>,
}

impl<K: Field> Ordered<K> {
    fn from_poly(p: &Poly<K>, order: &TermOrder) -> Self {
        let mut terms: Vec<Term<K>> = p
            .terms()
            .map(|(m, c)| Term { key: order.sort_key(m), mono: m.clone(), coef: c.clone() })
            .collect();
        terms.sort_by(|a, b| a.key.cmp(&b.key));
        Ordered { terms }
    }

    fn to_poly(&self, nvars: usize) -> Poly<K> {
        Poly::from_terms(nvars, self.terms.iter().map(|t| (t.mono.clone(), t.coef.clone())))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> &Term<K> {
        self.terms.last().expect("nonzero")
    }

    fn lm(&self) -> &Monomial {
        &self.lead().mono
    }

    fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.mono.degree()).max().unwrap_or(0)
    }

    fn make_monic(&mut self) {
        let inv = K::one().div(&self.lead().coef);
        self.scale(&inv);
    }

    /// Monic for ordinary fields, primitive for fraction-free ones.
    fn normalize(&mut self) {
        let f = if K::FRACTION_FREE {
            K::normalizer(self.terms.iter().map(|t| &t.coef))
        } else {
            K::one().div(&self.lead().coef)
        };
        self.scale(&f);
    }

    fn scale(&mut self, c: &K) {
        for t in &mut self.terms {
            t.coef = t.coef.mul(c);
        }
    }

    /// `self - c * m * other`.
    fn sub_mul(&self, other: &Ordered<K>, m: &Monomial, mkey: &[i64], c: &K) -> Ordered<K> {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let shifted = other.terms.iter().map(|t| Term {
            key: t.key.iter().zip(mkey).map(|(a, b)| a + b).collect(),
            mono: t.mono.mul(m),
            coef: t.coef.mul(c).neg(),
        });
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            let take_a = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(x), Some(y)) => match x.key.cmp(&y.key) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        let x = a.next().expect("peeked");
                        let y = b.next().expect("peeked");
                        let s = x.coef.add(&y.coef);
                        if !s.is_zero() {
                            out.push(Term { coef: s, ..x });
                        }
                        continue;
                    }
                },
            };
            out.push(if take_a { a.next() } else { b.next() }.expect("peeked"));
        }
        Ordered { terms: out }
    }
}

/// Full reduction of `p` modulo `basis`.
fn reduce<K: Field>(p: Ordered<K>, basis: &[&Ordered<K>], order: &TermOrder) -> Ordered<K> {
    let (mut rem, scale) = reduce_scaled(p, basis, order);
    if !scale.is_one() {
        rem.scale(&K::one().div(&scale));
    }
    rem
}

/// Remainder of `p` modulo `basis` up to the returned nonzero factor: the
/// first component is `scale` times the remainder. Fraction-free fields
/// eliminate by cross-multiplication and divide out contents as they go.
fn reduce_scaled<K: Field>(mut p: Ordered<K>, basis: &[&Ordered<K>], order: &TermOrder) -> (Ordered<K>, K) {
    let mut rem: Vec<Term<K>> = Vec::new();
    let mut scale = K::one();
    while let Some(lead) = p.terms.last() {
        let divisor = basis
            .iter()
            .filter(|g| g.lm().divides(&lead.mono))
            .min_by_key(|g| g.terms.len());
        match divisor {
            Some(g) => {
                let q = g.lm().quotient_of(&lead.mono).expect("divides");
                let qkey = order.sort_key(&q);
                if K::FRACTION_FREE {
                    let c = lead.coef.clone();
                    let a = g.lead().coef.clone();
                    if !a.is_one() {
                        p.scale(&a);
                        rem.iter_mut().for_each(|t| t.coef = t.coef.mul(&a));
                        scale = scale.mul(&a);
                    }
                    p = p.sub_mul(g, &q, &qkey, &c);
                    if rem.is_empty() && p.terms.is_empty() {
                        continue;
                    }
                    let f = K::normalizer(rem.iter().chain(p.terms.iter()).map(|t| &t.coef));
                    if !f.is_one() {
                        p.scale(&f);
                        rem.iter_mut().for_each(|t| t.coef = t.coef.mul(&f));
                        scale = scale.mul(&f);
                    }
                } else {
                    let c = lead.coef.div(&g.lead().coef);
                    p = p.sub_mul(g, &q, &qkey, &c);
                }
            }
            None => rem.push(p.terms.pop().expect("nonempty")),
        }
    }
    rem.reverse();
    (Ordered { terms: rem }, scale)
}

/// `lc(g) (l / lm f) f - lc(f) (l / lm g) g` with `l` the lcm of the leading
/// monomials; a nonzero multiple of the S-polynomial.
fn s_polynomial<K: Field>(f: &Ordered<K>, g: &Ordered<K>, order: &TermOrder) -> Ordered<K> {
    let l = f.lm().lcm(g.lm());
    let qf = f.lm().quotient_of(&l).expect("lcm");
    let qg = g.lm().quotient_of(&l).expect("lcm");
    let lf = f.lead().coef.clone();
    let lg = g.lead().coef.clone();
    let zero = Ordered { terms: Vec::new() };
    let a = zero.sub_mul(f, &qf, &order.sort_key(&qf), &lg.neg());
    a.sub_mul(g, &qg, &order.sort_key(&qg), &lf)
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    key: Vec<i64>,
}

/// A reduced Gröbner basis: monic, sorted ascending by leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<K: Field> {
    order: TermOrder,
    source: Ideal<K>,
    basis: Vec<Poly<K>>,
    ordered: Vec<Ordered<K>>,
}

pub fn buchberger<K: Field>(ideal: &Ideal<K>, order: &TermOrder) -> Result<GroebnerBasis<K>, IdealError> {
    buchberger_cancellable(ideal, order, &CancelToken::new())
}

/// Buchberger's algorithm with normal pair selection and the product and
/// chain criteria. Ties between pairs with equal lcm are broken by index.
pub fn buchberger_cancellable<K: Field>(
    ideal: &Ideal<K>,
    order: &TermOrder,
    cancel: &CancelToken,
) -> Result<GroebnerBasis<K>, IdealError> {
    let n = ideal.nvars();
    if order.nvars() != n {
        return Err(IdealError::DimensionMismatch { left: n, right: order.nvars() });
    }
    let cap = degree_cap();
    let mut g: Vec<Ordered<K>> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let add = |h: Ordered<K>, g: &mut Vec<Ordered<K>>, pairs: &mut Vec<Pair>| -> Result<(), IdealError> {
        let degree = h.total_degree();
        if degree > cap {
            return Err(IdealError::DegreeOverflow { degree, cap });
        }
        let k = g.len();
        for (i, gi) in g.iter().enumerate() {
            if gi.lm().is_coprime(h.lm()) {
                continue;
            }
            let lcm = gi.lm().lcm(h.lm());
            let key = order.sort_key(&lcm);
            pairs.push(Pair { i, j: k, lcm, key });
        }
        g.push(h);
        Ok(())
    };

    for p in ideal.generators() {
        if cancel.is_cancelled() {
            return Err(IdealError::Cancelled);
        }
        let refs: Vec<&Ordered<K>> = g.iter().collect();
        let (mut h, _) = reduce_scaled(Ordered::from_poly(p, order), &refs, order);
        if !h.is_zero() {
            h.normalize();
            add(h, &mut g, &mut pairs)?;
        }
    }

    while !pairs.is_empty() {
        if cancel.is_cancelled() {
            return Err(IdealError::Cancelled);
        }
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&pairs[a], &pairs[b]);
                pa.key.cmp(&pb.key).then(pa.j.cmp(&pb.j)).then(pa.i.cmp(&pb.i))
            })
            .expect("nonempty");
        let pair = pairs.swap_remove(best);
        if chain_criterion(&pair, &g, &pairs) {
            continue;
        }
        let s = s_polynomial(&g[pair.i], &g[pair.j], order);
        let refs: Vec<&Ordered<K>> = g.iter().collect();
        let (mut h, _) = reduce_scaled(s, &refs, order);
        if !h.is_zero() {
            h.normalize();
            add(h, &mut g, &mut pairs)?;
        }
    }

    let ordered = interreduce(g, order);
    let basis = ordered.iter().map(|o| o.to_poly(n)).collect();
    let gb = GroebnerBasis { order: order.clone(), source: ideal.clone(), basis, ordered };
    #[cfg(any(test, feature = "self-check"))]
    assert!(gb.is_groebner(), "Buchberger self-check failed");
    Ok(gb)
}

/// Skips `(i, j)` when some other element's leading monomial divides the
/// lcm and both pairs linking it to `i` and `j` have already been treated.
fn chain_criterion<K: Field>(pair: &Pair, g: &[Ordered<K>], pending: &[Pair]) -> bool {
    let queued = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        pending.iter().any(|p| p.i == a && p.j == b)
    };
    (0..g.len()).any(|k| {
        k != pair.i
            && k != pair.j
            && g[k].lm().divides(&pair.lcm)
            && !queued(pair.i, k)
            && !queued(pair.j, k)
    })
}

fn interreduce<K: Field>(g: Vec<Ordered<K>>, order: &TermOrder) -> Vec<Ordered<K>> {
    let mut keep: Vec<usize> = Vec::new();
    for (i, gi) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(j, gj)| {
            j != i && gj.lm().divides(gi.lm()) && (gj.lm() != gi.lm() || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<&Ordered<K>> = keep.iter().map(|&i| &g[i]).collect();
    let mut out: Vec<Ordered<K>> = Vec::with_capacity(minimal.len());
    for (idx, gi) in minimal.iter().enumerate() {
        let others: Vec<&Ordered<K>> =
            minimal.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, o)| *o).collect();
        // the leading term is irreducible in a minimal basis
        let (mut reduced, _) = reduce_scaled((*gi).clone(), &others, order);
        reduced.make_monic();
        out.push(reduced);
    }
    out.sort_by(|a, b| a.lead().key.cmp(&b.lead().key));
    out
}

impl<K: Field> GroebnerBasis<K> {
    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn source(&self) -> &Ideal<K> {
        &self.source
    }

    pub fn basis(&self) -> &[Poly<K>] {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.source.nvars()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.ordered.iter().map(|o| o.lm().clone()).collect()
    }

    /// The basis of the unit ideal is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.ordered.len() == 1 && self.ordered[0].lm().is_one()
    }

    /// Remainder of `p` under division by the basis; zero iff `p` is in the ideal.
    pub fn normal_form(&self, p: &Poly<K>) -> Result<Poly<K>, IdealError> {
        if p.nvars() != self.nvars() {
            return Err(IdealError::DimensionMismatch { left: self.nvars(), right: p.nvars() });
        }
        let refs: Vec<&Ordered<K>> = self.ordered.iter().collect();
        Ok(reduce(Ordered::from_poly(p, &self.order), &refs, &self.order).to_poly(self.nvars()))
    }

    pub fn contains(&self, p: &Poly<K>) -> Result<bool, IdealError> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// True iff every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        let lms = self.leading_monomials();
        if lms.iter().any(Monomial::is_one) {
            return true;
        }
        (0..self.nvars()).all(|v| lms.iter().any(|m| m.pure_power().is_some_and(|(i, _)| i == v)))
    }

    /// Every pairwise S-polynomial reduces to zero modulo the basis.
    pub fn is_groebner(&self) -> bool {
        let refs: Vec<&Ordered<K>> = self.ordered.iter().collect();
        for i in 0..self.ordered.len() {
            for j in (i + 1)..self.ordered.len() {
                let s = s_polynomial(&self.ordered[i], &self.ordered[j], &self.order);
                if !reduce_scaled(s, &refs, &self.order).0.is_zero() {
                    return false;
                }
            }
        }
        self.source.generators().iter().all(|p| self.normal_form(p).map(|r| r.is_zero()).unwrap_or(false))
    }

    /// Monic, minimal, and no basis term is divisible by another leading monomial.
    pub fn is_reduced(&self) -> bool {
        let lms = self.leading_monomials();
        self.ordered.iter().enumerate().all(|(i, g)| {
            g.lead().coef.is_one()
                && g.terms.iter().all(|t| lms.iter().enumerate().all(|(j, m)| j == i || !m.divides(&t.mono)))
        })
    }
}
