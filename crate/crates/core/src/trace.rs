//! The trace pushforward `g_* p` of a function along a finite map, computed
//! in the fiber algebra `Q(y)[x] / ⟨g(x) - y⟩`.

use thiserror::Error;

use crate::forms::DifferentialForm;
use crate::geometry::{pullback_unchecked, FoliationGerm, GeometryError, HypersurfaceGerm, MapGerm};
use crate::ideals::{buchberger_cancellable, CancelToken, Ideal, IdealError, QuotientRing};
use crate::poly::{rat, Field, Monomial, Poly, PolyError, Polynomial, Rational, TermOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("map is not strictly finite: {0}")]
    NotStrictlyFinite(String),
    #[error("trace has a non-polynomial denominator")]
    NonPolynomialTrace,
    #[error("pullback foliation is not a coordinate differential dx_j")]
    NotStraightened,
    #[error("all tested powers push forward to zero")]
    Degenerate,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A fraction of polynomials in the target variables, in lowest terms with
/// a canonical denominator.
///
/// Scalars produced through [`Field`] (which carries no dimension) are
/// stored over zero variables and promoted on contact with a fraction
/// over `n` variables.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

fn lift(p: &Polynomial, n: usize) -> Polynomial {
    if p.nvars() == n {
        p.clone()
    } else {
        assert!(p.nvars() == 0, "rational functions over different variable sets");
        Polynomial::constant(n, p.constant_term())
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let n = num.nvars().max(den.nvars());
        Ok(Self::normalized(lift(&num, n), lift(&den, n)))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let n = p.nvars();
        RationalFunction { num: p, den: Polynomial::one(n) }
    }

    pub fn scalar(c: Rational) -> Self {
        Self::from_polynomial(Polynomial::constant(0, c))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// The polynomial this fraction equals, if its denominator is constant.
    pub fn to_polynomial(&self, nvars: usize) -> Option<Polynomial> {
        self.den.is_constant().then(|| lift(&self.num, nvars).scale(&(rat(1) / self.den.constant_term())))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return RationalFunction { num, den: Polynomial::one(n) };
        }
        if den.is_constant() {
            let inv = rat(1) / den.constant_term();
            return RationalFunction { num: num.scale(&inv), den: Polynomial::one(n) };
        }
        let g = num.gcd(&den).expect("nonzero");
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let u = den.normalizing_unit().expect("nonzero");
        RationalFunction { num: num.scale(&u), den: den.scale(&u) }
    }

    fn dims(&self, other: &Self) -> usize {
        self.num.nvars().max(other.num.nvars())
    }

    fn is_poly(&self) -> bool {
        self.den.is_constant()
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        let n = self.dims(other);
        lift(&self.num, n) == lift(&other.num, n) && lift(&self.den, n) == lift(&other.den, n)
    }
}

impl Field for RationalFunction {
    fn zero() -> Self {
        Self::scalar(rat(0))
    }

    fn one() -> Self {
        Self::scalar(rat(1))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.dims(other);
        if self.is_poly() && other.is_poly() {
            return Self::from_polynomial(&lift(&self.num, n) + &lift(&other.num, n));
        }
        let (an, ad, bn, bd) = (lift(&self.num, n), lift(&self.den, n), lift(&other.num, n), lift(&other.den, n));
        if ad == bd {
            return Self::normalized(&an + &bn, ad);
        }
        Self::normalized(&(&an * &bd) + &(&bn * &ad), &ad * &bd)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.dims(other);
        if self.is_poly() && other.is_poly() {
            return Self::from_polynomial(&lift(&self.num, n) * &lift(&other.num, n));
        }
        Self::normalized(&lift(&self.num, n) * &lift(&other.num, n), &lift(&self.den, n) * &lift(&other.den, n))
    }

    fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero rational function");
        let inverse = Self::normalized(other.den.clone(), other.num.clone());
        self.mul(&inverse)
    }

    fn from_integer(n: i64) -> Self {
        Self::scalar(rat(n))
    }
}

/// The algebra `Q(y)[x] / ⟨g_1(x) - y_1, …, g_n(x) - y_n⟩` of a strictly
/// finite map germ.
#[derive(Clone, Debug)]
pub struct FiberAlgebra {
    n: usize,
    ring: QuotientRing<RationalFunction>,
}

impl FiberAlgebra {
    /// Checks strict finiteness, then builds the fiber algebra.
    ///
    /// Strict finiteness asks that `⟨g⟩` is zero-dimensional with the origin
    /// as its only zero (every `x_i^D` lies in `⟨g⟩`, `D` the quotient
    /// dimension) and that each `x_i` is integral over the target, which is
    /// tested through polynomiality of the power sums `trace(x_i^k)`.
    pub fn new(g: &MapGerm) -> Result<Self, TraceError> {
        Self::with_cancel(g, &CancelToken::new())
    }

    pub fn with_cancel(g: &MapGerm, cancel: &CancelToken) -> Result<Self, TraceError> {
        let n = g.dim();
        let central = buchberger_cancellable(&Ideal::new(g.components().to_vec())?, &TermOrder::grevlex(n), cancel)?;
        if !central.is_zero_dimensional() {
            return Err(TraceError::NotStrictlyFinite("⟨g⟩ is not zero-dimensional".into()));
        }
        let local = central.standard_monomials()?.dimension() as u32;
        for i in 0..n {
            let power = Polynomial::monomial(Monomial::var_power(n, i, local), rat(1));
            if !central.contains(&power)? {
                return Err(TraceError::NotStrictlyFinite(format!("g vanishes away from the origin (x{} not nilpotent)", i + 1)));
            }
        }

        let gens: Vec<Poly<RationalFunction>> = g
            .components()
            .iter()
            .enumerate()
            .map(|(i, gi)| {
                let mut p = gi.map_coefficients(|c| RationalFunction::scalar(c.clone()));
                let yi = RationalFunction::from_polynomial(-Polynomial::var(n, i));
                p = &p + &Poly::constant(n, yi);
                p
            })
            .collect();
        let gb = buchberger_cancellable(&Ideal::new(gens)?, &TermOrder::grevlex(n), cancel)?;
        let ring = QuotientRing::new(gb).map_err(|_| TraceError::NotStrictlyFinite("generic fiber is not finite".into()))?;
        let algebra = FiberAlgebra { n, ring };

        let delta = algebra.degree() as u32;
        for i in 0..n {
            let mut xk = Polynomial::one(n);
            let xi = Polynomial::var(n, i);
            for _ in 0..delta {
                xk = &xk * &xi;
                if !algebra.raw_trace(&xk)?.is_poly() {
                    return Err(TraceError::NotStrictlyFinite(format!("x{} is not integral over the target", i + 1)));
                }
            }
        }
        Ok(algebra)
    }

    /// Topological degree: the dimension over `Q(y)`.
    pub fn degree(&self) -> usize {
        self.ring.dimension()
    }

    pub fn quotient(&self) -> &QuotientRing<RationalFunction> {
        &self.ring
    }

    fn raw_trace(&self, p: &Polynomial) -> Result<RationalFunction, TraceError> {
        if p.nvars() != self.n {
            return Err(TraceError::DimensionMismatch { left: self.n, right: p.nvars() });
        }
        let lifted = p.map_coefficients(|c| RationalFunction::scalar(c.clone()));
        Ok(self.ring.trace(&lifted)?)
    }

    /// `g_* p` as a polynomial in the target variables.
    pub fn trace(&self, p: &Polynomial) -> Result<Polynomial, TraceError> {
        self.raw_trace(p)?.to_polynomial(self.n).ok_or(TraceError::NonPolynomialTrace)
    }
}

pub fn trace_pushforward(g: &MapGerm, p: &Polynomial) -> Result<Polynomial, TraceError> {
    FiberAlgebra::new(g)?.trace(p)
}

/// `dψ ∧ ω = 0` identically.
pub fn tangency_check(psi: &Polynomial, form: &DifferentialForm) -> Result<bool, TraceError> {
    if psi.nvars() != form.nvars() {
        return Err(TraceError::DimensionMismatch { left: form.nvars(), right: psi.nvars() });
    }
    let dpsi = DifferentialForm::function(psi.clone()).exterior_derivative();
    Ok(dpsi.wedge(form).map_err(GeometryError::from)?.is_zero())
}

pub const DEFAULT_MAX_POWER: u32 = 6;

/// Result of [`invariant_hypersurface_candidate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub germ: HypersurfaceGerm,
    /// The unreduced pushforward `g_*(x_j^k)`.
    pub pushforward: Polynomial,
    pub power_used: u32,
    /// Index `j` with `g#ω = dx_j`.
    pub coordinate: usize,
    pub tangent: bool,
}

/// For `g` already straightened so that `g#ω = dx_j`, pushes forward the
/// powers of `x_j` until one is nonzero and returns its reduced zero set.
pub fn invariant_hypersurface_candidate(g: &MapGerm, f: &FoliationGerm) -> Result<Candidate, TraceError> {
    invariant_hypersurface_candidate_up_to(g, f, DEFAULT_MAX_POWER)
}

pub fn invariant_hypersurface_candidate_up_to(
    g: &MapGerm,
    f: &FoliationGerm,
    max_power: u32,
) -> Result<Candidate, TraceError> {
    let n = g.dim();
    let pulled = pullback_unchecked(g, f)?;
    let coordinate = (0..n)
        .find(|&j| pulled.foliation.form() == &DifferentialForm::differential(n, j))
        .ok_or(TraceError::NotStraightened)?;
    let algebra = FiberAlgebra::new(g)?;
    let xj = Polynomial::var(n, coordinate);
    let mut power = Polynomial::one(n);
    for k in 1..=max_power {
        power = &power * &xj;
        let pushforward = algebra.trace(&power)?;
        if pushforward.is_zero() {
            continue;
        }
        let germ = HypersurfaceGerm::reduced(&pushforward)?;
        let tangent = tangency_check(germ.defining(), f.form())?;
        return Ok(Candidate { germ, pushforward, power_used: k, coordinate, tangent });
    }
    Err(TraceError::Degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_form_in, parse_polynomial_in};

    fn x(s: &str, n: usize) -> Polynomial {
        parse_polynomial_in(s, n, 'x').unwrap()
    }

    fn y(s: &str, n: usize) -> Polynomial {
        parse_polynomial_in(s, n, 'y').unwrap()
    }

    fn map(parts: &[&str]) -> MapGerm {
        MapGerm::new(parts.iter().map(|p| x(p, parts.len())).collect()).unwrap()
    }

    fn fol(s: &str, n: usize) -> FoliationGerm {
        FoliationGerm::new(parse_form_in(s, n, 'y').unwrap()).unwrap()
    }

    #[test]
    fn rational_function_arithmetic() {
        let a = RationalFunction::new(y("y1", 2), y("y1 + y2", 2)).unwrap();
        let b = RationalFunction::new(y("y2", 2), y("y1 + y2", 2)).unwrap();
        assert_eq!(a.add(&b), RationalFunction::one());
        let c = RationalFunction::new(y("2*y1^2 - 2*y1*y2", 2), y("-4*y1 + 4*y2", 2)).unwrap();
        assert_eq!(c, RationalFunction::from_polynomial(y("-1/2*y1", 2)));
        assert_eq!(a.div(&a), RationalFunction::one());
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_pushforward(&map(&["x1^2 - x2*x1", "x2"]), &x("x1", 2)).unwrap(), y("y2", 2));
        let fold = map(&["x1^2", "x2"]);
        assert!(trace_pushforward(&fold, &x("x1", 2)).unwrap().is_zero());
        assert_eq!(trace_pushforward(&fold, &x("x1^2", 2)).unwrap(), y("2*y1", 2));
        assert_eq!(trace_pushforward(&MapGerm::identity(2), &x("x1", 2)).unwrap(), y("y1", 2));
        assert_eq!(trace_pushforward(&fold, &x("1", 2)).unwrap(), y("2", 2));
    }

    #[test]
    fn non_strict_maps_are_rejected() {
        // root escapes to infinity as y1 -> 0
        let g = map(&["x1", "x2 + x1*x2^2"]);
        assert!(g.is_finite().unwrap());
        assert!(matches!(FiberAlgebra::new(&g), Err(TraceError::NotStrictlyFinite(_))));
    }

    #[test]
    fn tangency_examples() {
        assert!(tangency_check(&y("y1", 2), fol("dy1", 2).form()).unwrap());
        assert!(!tangency_check(&y("y2", 2), fol("dy1", 2).form()).unwrap());
        assert!(tangency_check(&y("y1*y2", 2), fol("y2 dy1 + y1 dy2", 2).form()).unwrap());
    }

    #[test]
    fn candidates() {
        let c = invariant_hypersurface_candidate(&MapGerm::identity(2), &fol("dy1", 2)).unwrap();
        assert_eq!((c.germ.defining().clone(), c.power_used), (y("y1", 2), 1));
        let c = invariant_hypersurface_candidate(&map(&["x1^2", "x2"]), &fol("dy1", 2)).unwrap();
        assert_eq!((c.germ.defining().clone(), c.pushforward.clone(), c.power_used), (y("y1", 2), y("2*y1", 2), 2));
        assert!(c.tangent);
        let c = invariant_hypersurface_candidate(&map(&["x1^2 - x2*x1", "x2"]), &fol("dy2", 2)).unwrap();
        assert_eq!((c.coordinate, c.germ.defining().clone()), (1, y("y2", 2)));
        assert!(c.tangent);
        assert_eq!(
            invariant_hypersurface_candidate(&map(&["x1^2 - x2^2", "x2"]), &fol("dy1", 2)),
            Err(TraceError::NotStraightened)
        );
    }
}
