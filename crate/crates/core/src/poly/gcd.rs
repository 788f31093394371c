//! Multivariate gcd over the rationals by recursive content / primitive part
//! reduction onto a univariate subresultant remainder sequence, plus the
//! squarefree part built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::Rational;
use super::univariate::Dense;
use super::{Monomial, PolyError, Polynomial, TermOrder};

impl Polynomial {
    /// The canonical associate: integer coefficients with content 1 and a
    /// positive leading coefficient under grevlex. Zero maps to zero.
    pub fn canonical(&self) -> Polynomial {
        let Some(unit) = self.normalizing_unit() else {
            return self.clone();
        };
        self.scale(&unit)
    }

    /// The rational `u` with `self * u == self.canonical()`.
    pub fn normalizing_unit(&self) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        let mut den_lcm = BigInt::one();
        for (_, c) in self.terms() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for (_, c) in self.terms() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let order = TermOrder::grevlex(self.nvars());
        let (_, lc) = self.leading_term(&order).expect("nonzero");
        let mut unit = Rational::new(den_lcm, num_gcd);
        if lc.is_negative() {
            unit = -unit;
        }
        Some(unit)
    }

    pub fn is_canonical(&self) -> bool {
        self.normalizing_unit().is_none_or(|u| u.is_one())
    }

    pub fn is_nonzero_constant(&self) -> bool {
        !self.is_zero() && self.is_constant()
    }

    /// Greatest common divisor, returned as the canonical associate.
    pub fn gcd(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.nvars() != other.nvars() {
            return Err(PolyError::DimensionMismatch { left: self.nvars(), right: other.nvars() });
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Err(PolyError::BothZero),
            (true, false) => Ok(other.canonical()),
            (false, true) => Ok(self.canonical()),
            (false, false) => {
                let (a, b) = (self.canonical(), other.canonical());
                Ok(heuristic_gcd(&a, &b).unwrap_or_else(|| gcd_rec(&a, &b)).canonical())
            }
        }
    }

    /// Gcd of a list, skipping zeros. Fails if every entry is zero.
    pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Result<Polynomial, PolyError> {
        let mut acc: Option<Polynomial> = None;
        for p in polys {
            if p.is_zero() {
                continue;
            }
            let next = match acc {
                None => p.canonical(),
                Some(a) => a.gcd(p)?,
            };
            if next.is_constant() {
                return Ok(next);
            }
            acc = Some(next);
        }
        acc.ok_or(PolyError::BothZero)
    }

    /// Product of the distinct irreducible factors, as a canonical associate.
    pub fn squarefree_part(&self) -> Result<Polynomial, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut r = self.canonical();
        loop {
            let grad = r.gradient();
            let g = Polynomial::gcd_all(std::iter::once(&r).chain(grad.iter()))?;
            if g.is_constant() {
                return Ok(r);
            }
            r = r.exact_div(&g)?.canonical();
        }
    }
}

fn gcd_rec(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let n = p.nvars();
    if p.is_constant() || q.is_constant() {
        return Polynomial::one(n);
    }
    let Some(v) = (0..n).rev().find(|&v| p.involves(v) || q.involves(v)) else {
        return Polynomial::one(n);
    };
    match (p.involves(v), q.involves(v)) {
        (false, _) => gcd_rec(p, &content_in(q, v)),
        (_, false) => gcd_rec(&content_in(p, v), q),
        _ => {
            if certainly_coprime(p, q) {
                return Polynomial::one(n);
            }
            let cp = content_in(p, v);
            let cq = content_in(q, v);
            let pp = p.exact_div(&cp).expect("content divides");
            let qq = q.exact_div(&cq).expect("content divides");
            let c = gcd_rec(&cp, &cq);
            let g = subresultant_gcd(pp, qq, v);
            &c * &g
        }
    }
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &Polynomial, var: usize) -> Polynomial {
    let mut acc: Option<Polynomial> = None;
    for c in p.coefficients_in(var).into_iter().filter(|c| !c.is_zero()) {
        acc = Some(match acc {
            None => c,
            Some(a) => gcd_rec(&a, &c),
        });
        if acc.as_ref().is_some_and(|a| a.is_constant()) {
            return Polynomial::one(p.nvars());
        }
    }
    acc.map(|a| a.canonical()).unwrap_or_else(|| Polynomial::one(p.nvars()))
}

/// Coefficient list in `var`, ascending; entries do not involve `var`.
type Univariate = Vec<Polynomial>;

fn to_univariate(p: &Polynomial, var: usize) -> Univariate {
    p.coefficients_in(var)
}

fn from_univariate(u: &[Polynomial], var: usize, nvars: usize) -> Polynomial {
    let mut out = Polynomial::zero(nvars);
    for (k, c) in u.iter().enumerate() {
        let shift = Monomial::var_power(nvars, var, k as u32);
        for (m, coeff) in c.terms() {
            out.add_term(m.mul(&shift), coeff);
        }
    }
    out
}

fn trim(u: &mut Univariate) {
    while u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_remainder(a: &Univariate, b: &Univariate) -> Univariate {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    let mut e = (a.len() - 1) as i64 - db as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let lr = r[k].clone();
        let shift = k - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&lr * bc);
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 && !r.is_empty() {
        let f = lb.pow_uncapped(e as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Gcd of two polynomials primitive in `var`, both involving it.
fn subresultant_gcd(a: Polynomial, b: Polynomial, var: usize) -> Polynomial {
    let n = a.nvars();
    let mut a = to_univariate(&a, var);
    let mut b = to_univariate(&b, var);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Polynomial::one(n);
    let mut h = Polynomial::one(n);
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = pseudo_remainder(&a, &b);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return Polynomial::one(n);
        }
        a = b;
        let div = &g * &h.pow_uncapped(delta);
        b = r
            .iter()
            .map(|c| c.exact_div(&div).expect("subresultant division is exact"))
            .collect();
        g = a.last().expect("nonzero").clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow_uncapped(delta);
            let den = h.pow_uncapped(delta - 1);
            num.exact_div(&den).expect("subresultant h update is exact")
        };
    }
    let bp = from_univariate(&b, var, n);
    let c = content_in(&bp, var);
    bp.exact_div(&c).expect("content divides")
}

const HEURISTIC_TRIES: usize = 6;
/// Evaluation points beyond this many bits are left to the remainder sequence.
const HEURISTIC_MAX_BITS: u64 = 1 << 16;

fn max_norm(p: &Polynomial) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn integer_content(p: &Polynomial) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

/// `p` with `x_var = xi`.
fn evaluate_at(p: &Polynomial, var: usize, xi: &BigInt) -> Polynomial {
    let mut out = Polynomial::zero(p.nvars());
    let mut powers = vec![BigInt::one()];
    for (m, c) in p.terms() {
        let e = m.exponent(var) as usize;
        while powers.len() <= e {
            let next = powers.last().expect("nonempty") * xi;
            powers.push(next);
        }
        let mut m = m.clone();
        m.exponents_mut()[var] = 0;
        out.add_term(m, &(c * Rational::from_integer(powers[e].clone())));
    }
    out
}

/// Reads each integer coefficient of `g` in balanced base `xi` as a
/// polynomial in `x_var`.
fn interpolate(g: &Polynomial, var: usize, xi: &BigInt) -> Polynomial {
    let half = xi / 2;
    let mut out = Polynomial::zero(g.nvars());
    for (m, c) in g.terms() {
        let mut v = c.numer().clone();
        let mut k = 0u32;
        while !v.is_zero() {
            let mut d = v.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            if !d.is_zero() {
                out.add_term(m.mul(&Monomial::var_power(g.nvars(), var, k)), &Rational::from_integer(d.clone()));
            }
            v = (v - d) / xi;
            k += 1;
        }
    }
    out
}

fn divides(d: &Polynomial, p: &Polynomial) -> bool {
    (0..p.nvars()).all(|v| d.degree_in(v) <= p.degree_in(v)) && p.exact_div(d).is_ok()
}

/// Heuristic gcd of integer polynomials by evaluation at a large integer
/// and balanced-base reconstruction, with a divisibility check that makes
/// every returned answer correct. `None` when no evaluation point worked.
fn heuristic_gcd(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let n = a.nvars();
    let (ca, cb) = (integer_content(a), integer_content(b));
    if ca.is_zero() || cb.is_zero() {
        return None;
    }
    let c = Rational::from_integer(ca.gcd(&cb));
    let Some(var) = (0..n).rev().find(|&v| a.involves(v) || b.involves(v)) else {
        return Some(Polynomial::constant(n, c));
    };
    let a = a.scale(&Rational::new(BigInt::one(), ca));
    let b = b.scale(&Rational::new(BigInt::one(), cb));
    let degree = a.degree_in(var).max(b.degree_in(var)) as u64;
    let mut xi: BigInt = max_norm(&a).min(max_norm(&b)) * 2 + 2;
    for _ in 0..HEURISTIC_TRIES {
        if xi.bits() * degree.max(1) > HEURISTIC_MAX_BITS {
            return None;
        }
        let (ea, eb) = (evaluate_at(&a, var, &xi), evaluate_at(&b, var, &xi));
        if !ea.is_zero() && !eb.is_zero() {
            let gamma = heuristic_gcd(&ea, &eb)?;
            let g = interpolate(&gamma, var, &xi);
            let content = integer_content(&g);
            if !content.is_zero() {
                let g = g.scale(&Rational::new(BigInt::one(), content));
                if divides(&g, &a) && divides(&g, &b) {
                    return Some(g.scale(&c));
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

const PROBE_VALUES: [i64; 12] = [2, -3, 5, 1, -7, 4, 11, -2, 3, -5, 13, 6];

/// Sound but incomplete coprimality test: `true` means gcd(p, q) is constant.
///
/// For each shared variable, the other variables are specialized at a point
/// where both leading coefficients survive; the specialized univariate gcd
/// then bounds the degree of the true gcd in that variable.
pub fn certainly_coprime(p: &Polynomial, q: &Polynomial) -> bool {
    let n = p.nvars();
    for v in 0..n {
        if !(p.involves(v) && q.involves(v)) {
            continue;
        }
        let pc = p.coefficients_in(v);
        let qc = q.coefficients_in(v);
        let mut decided = false;
        for attempt in 0..4 {
            let point: Vec<Rational> = (0..n)
                .map(|j| {
                    let k = (j * 5 + attempt * 7 + v) % PROBE_VALUES.len();
                    Rational::from_integer(BigInt::from(PROBE_VALUES[k]))
                })
                .collect();
            let lp = pc.last().expect("involves v").evaluate(&point);
            let lq = qc.last().expect("involves v").evaluate(&point);
            if lp.is_zero() || lq.is_zero() {
                continue;
            }
            let ps = Dense::new(pc.iter().map(|c| c.evaluate(&point)).collect());
            let qs = Dense::new(qc.iter().map(|c| c.evaluate(&point)).collect());
            if Dense::gcd_degree(&ps, &qs) > 0 {
                return false;
            }
            decided = true;
            break;
        }
        if !decided {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_polynomial_in;

    fn p(s: &str) -> Polynomial {
        parse_polynomial_in(s, 3, 'x').unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(p("x1^2*x2 + x1*x2^2").gcd(&p("x1*x2")).unwrap(), p("x1*x2"));
        assert_eq!(p("2*x1").gcd(&Polynomial::zero(3)).unwrap(), p("x1"));
        assert_eq!(p("x1 + x2").gcd(&p("x1 - x2")).unwrap(), p("1"));
        assert_eq!(Polynomial::zero(3).gcd(&Polynomial::zero(3)), Err(PolyError::BothZero));
    }

    #[test]
    fn gcd_with_shared_nonmonomial_factor() {
        let f = p("x1^2 + x2*x3 - 1");
        let a = &f * &p("x1 - x3^2");
        let b = &f * &p("x2 + 3*x1*x3");
        assert_eq!(a.gcd(&b).unwrap(), f.canonical());
        let c = &(&f * &f) * &p("x3");
        assert_eq!(c.gcd(&a).unwrap(), f.canonical());
    }

    #[test]
    fn heuristic_agrees_with_remainder_sequence() {
        let f = p("3*x1^2*x2 - x2*x3 + 7");
        let a = &f * &p("x1^3 - 2*x3^2 + x2");
        let b = &(&f * &f) * &p("5*x2 - x1*x3");
        let h = heuristic_gcd(&a.canonical(), &b.canonical()).unwrap().canonical();
        assert_eq!(h, gcd_rec(&a, &b).canonical());
        assert_eq!(h, f.canonical());
        let big = p("x1^2 - x2^2").pow(4).unwrap();
        assert_eq!(big.gcd(&p("x1 + x2")).unwrap(), p("x1 + x2"));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(p("-3/2*x1 + 3*x2").canonical(), p("x1 - 2*x2"));
        assert_eq!(p("-4").canonical(), p("1"));
        assert!(p("x1 - 2*x2").is_canonical());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(p("x1^2*x2").squarefree_part().unwrap(), p("x1*x2"));
        assert_eq!(p("x1^2 - x2^2").squarefree_part().unwrap(), p("x1^2 - x2^2"));
        let q = &p("x1 + x2").pow(3).unwrap() * &p("x1 - x2");
        assert_eq!(q.squarefree_part().unwrap(), p("x1^2 - x2^2"));
        assert_eq!(Polynomial::zero(3).squarefree_part(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn coprimality_certificate_is_sound_on_common_factor() {
        let f = p("x1 + x2 + x3");
        assert!(!certainly_coprime(&(&f * &p("x1")), &(&f * &p("x2"))));
        assert!(certainly_coprime(&p("x1^2 + x2"), &p("x2^2 + x3 + x1")));
    }
}
