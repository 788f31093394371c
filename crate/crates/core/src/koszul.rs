//! Lifting through the Koszul complex of `η = Σ a_i(g(x)) dx_i`, and the
//! vanishing-order bookkeeping that closes the argument for finite maps.

use num_traits::Zero;
use thiserror::Error;

use crate::forms::{DifferentialForm, FormError};
use crate::geometry::{FoliationGerm, GeometryError, MapGerm};
use crate::ideals::{truncated_linear_solve, CancelToken, Ideal, IdealError, LinearSystem};
use crate::poly::{degree_cap, Monomial, PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("the coefficients of eta do not form a regular sequence at the origin")]
    RegularSequenceFails,
    #[error("tau wedge eta is not zero")]
    PreconditionWedgeNonzero,
    #[error("no lift with coefficients of degree at most {bound}")]
    LiftNotFoundAtBound { bound: u32 },
    #[error("expected a {expected}-form, found a {found}-form")]
    WrongDegree { expected: usize, found: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A map germ `g`, the coefficients `a` of `ω = Σ a_i dy_i`, and the
/// composed 1-form `η = Σ a_i(g(x)) dx_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KoszulInstance {
    pub g: MapGerm,
    pub a: Vec<Polynomial>,
    pub eta: DifferentialForm,
}

pub fn build_eta(g: &MapGerm, a: &[Polynomial]) -> Result<KoszulInstance, KoszulError> {
    let n = g.dim();
    if a.len() != n {
        return Err(KoszulError::DimensionMismatch { left: n, right: a.len() });
    }
    let composed = a.iter().map(|ai| g.pull(ai)).collect::<Result<Vec<_>, _>>()?;
    Ok(KoszulInstance { g: g.clone(), a: a.to_vec(), eta: DifferentialForm::one_form(composed) })
}

impl KoszulInstance {
    pub fn from_foliation(g: &MapGerm, f: &FoliationGerm) -> Result<Self, KoszulError> {
        build_eta(g, &f.form().one_form_coefficients()?)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `a_i ∘ g`.
    pub fn composed(&self, i: usize) -> Polynomial {
        self.eta.coefficient(&[i])
    }

    /// The same `ω` with `g` replaced by `g(.., x_var^n, ..)`.
    pub fn power_substitute(&self, var: usize, n: u32) -> Result<Self, KoszulError> {
        build_eta(&self.g.power_substitute(var, n)?, &self.a)
    }
}

/// `τ_ℓ = Σ_i (-1)^{n-i} ∂g_i/∂x_ℓ dx_1∧..∧(dx_i omitted)∧..∧dx_n` for
/// `ℓ = 2..n` (1-based), returned in that order.
pub fn tau_forms(g: &MapGerm) -> Vec<DifferentialForm> {
    let n = g.dim();
    (1..n)
        .map(|l| {
            let terms = g.components().iter().enumerate().map(|(i, gi)| {
                let d = gi.partial_derivative(l).expect("index in range");
                let idx: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                // 1-based exponent n - (i + 1)
                (idx, if (n - i - 1) % 2 == 1 { -d } else { d })
            });
            DifferentialForm::from_terms(n, n - 1, terms)
        })
        .collect()
}

/// `b_ℓ = Σ_i a_i(g(x)) ∂g_i/∂x_ℓ`, the `dx_ℓ` coefficient of `g*ω`.
pub fn pullback_coefficient(inst: &KoszulInstance, l: usize) -> Polynomial {
    let n = inst.dim();
    let mut acc = Polynomial::zero(n);
    for (i, gi) in inst.g.components().iter().enumerate() {
        let d = gi.partial_derivative(l).expect("index in range");
        acc = &acc + &(&inst.composed(i) * &d);
    }
    acc
}

/// For each `ℓ = 2..n`, whether `b_ℓ = 0`.
///
/// The answer is computed three ways, from the sum defining `b_ℓ`, from
/// `τ_ℓ ∧ η = b_ℓ dx_1∧..∧dx_n`, and from the pulled-back form `g*ω`, and
/// any disagreement is reported as an internal inconsistency.
pub fn vanishing_wedge_check(inst: &KoszulInstance) -> Result<Vec<bool>, KoszulError> {
    let n = inst.dim();
    let volume: Vec<usize> = (0..n).collect();
    let omega = DifferentialForm::one_form(inst.a.clone());
    let pulled = omega.pullback(inst.g.components())?;
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for (k, tau) in tau_forms(&inst.g).iter().enumerate() {
        let l = k + 1;
        let b = pullback_coefficient(inst, l);
        let wedge = tau.wedge(&inst.eta)?.coefficient(&volume);
        if wedge != b || pulled.coefficient(&[l]) != b {
            return Err(KoszulError::InternalInconsistency(format!(
                "b_{} disagrees between the sum, the wedge and the pullback",
                l + 1
            )));
        }
        out.push(b.is_zero());
    }
    Ok(out)
}

/// Whether `a_1∘g, .., a_n∘g` is a regular sequence in the local ring at
/// the origin, i.e. whether their common zero set has the origin as an
/// isolated point. A sequence containing a unit or a zero entry fails.
pub fn regular_sequence_check(inst: &KoszulInstance) -> Result<bool, KoszulError> {
    regular_sequence_check_with(inst, &CancelToken::new())
}

pub fn regular_sequence_check_with(inst: &KoszulInstance, cancel: &CancelToken) -> Result<bool, KoszulError> {
    let gens: Vec<Polynomial> = (0..inst.dim()).map(|i| inst.composed(i)).collect();
    if gens.iter().any(|p| p.is_zero() || !p.constant_term().is_zero()) {
        return Ok(false);
    }
    Ok(Ideal::new(gens)?.origin_is_isolated_zero_with(cancel)?)
}

/// A solution `α` of `α ∧ η = τ` and the residual `α ∧ η - τ`, recomputed
/// after the solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub alpha: DifferentialForm,
    pub degree_bound_used: u32,
    pub residual: DifferentialForm,
}

fn max_coefficient_degree(f: &DifferentialForm) -> u32 {
    f.terms().filter_map(|(_, c)| c.total_degree()).max().unwrap_or(0)
}

/// `deg τ + deg η + 4`, degrees taken over the coefficients.
pub fn default_bound(inst: &KoszulInstance, tau: &DifferentialForm) -> u32 {
    max_coefficient_degree(tau) + max_coefficient_degree(&inst.eta) + 4
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < n - k + p) else {
            return out;
        };
        cur[pos] += 1;
        for q in pos + 1..k {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

/// Solves `α ∧ η = τ` for an `(n-2)`-form `α` with coefficients of degree at
/// most `degree_bound`. Bounds `0, 1, 2, 4, ..` up to `degree_bound` are tried
/// in turn, since the system grows quickly with the bound and a low-degree
/// lift is usual; `degree_bound_used` is the stage that succeeded.
///
/// Requires `a∘g` to be a regular sequence and `τ ∧ η = 0`. Failure at a
/// given bound does not refute existence: the complex is exact over the
/// local ring, and a local solution may need denominators that are units
/// at the origin.
pub fn koszul_lift(inst: &KoszulInstance, tau: &DifferentialForm, degree_bound: u32) -> Result<LiftResult, KoszulError> {
    check_tau(inst, tau)?;
    if !regular_sequence_check(inst)? {
        return Err(KoszulError::RegularSequenceFails);
    }
    if !tau.wedge(&inst.eta)?.is_zero() {
        return Err(KoszulError::PreconditionWedgeNonzero);
    }
    let mut stage = 0;
    loop {
        if let Some(lift) = solve_lift(inst, tau, stage)? {
            return Ok(lift);
        }
        if stage == degree_bound {
            return Err(KoszulError::LiftNotFoundAtBound { bound: degree_bound });
        }
        stage = (stage.max(1) * 2).min(degree_bound);
    }
}

/// Starts at [`default_bound`] and doubles while the degree cap allows.
pub fn koszul_lift_escalating(inst: &KoszulInstance, tau: &DifferentialForm) -> Result<LiftResult, KoszulError> {
    let mut bound = default_bound(inst, tau);
    let headroom = degree_cap().saturating_sub(max_coefficient_degree(&inst.eta));
    bound = bound.min(headroom);
    loop {
        match koszul_lift(inst, tau, bound) {
            Err(KoszulError::LiftNotFoundAtBound { .. }) if bound < headroom => {
                bound = (bound.max(1) * 2).min(headroom);
            }
            other => return other,
        }
    }
}

fn check_tau(inst: &KoszulInstance, tau: &DifferentialForm) -> Result<(), KoszulError> {
    let n = inst.dim();
    if tau.nvars() != n {
        return Err(KoszulError::DimensionMismatch { left: n, right: tau.nvars() });
    }
    if n < 2 || (tau.degree() != n - 1 && !tau.is_zero()) {
        return Err(KoszulError::WrongDegree { expected: n.saturating_sub(1), found: tau.degree() });
    }
    Ok(())
}

fn solve_lift(inst: &KoszulInstance, tau: &DifferentialForm, bound: u32) -> Result<Option<LiftResult>, KoszulError> {
    let n = inst.dim();
    let unknowns = subsets(n, n - 2);
    let pieces: Vec<DifferentialForm> = unknowns
        .iter()
        .map(|idx| DifferentialForm::from_terms(n, n - 2, [(idx.clone(), Polynomial::one(n))]).wedge(&inst.eta))
        .collect::<Result<_, _>>()?;
    let mut system = LinearSystem::new(n, unknowns.len());
    for target in subsets(n, n - 1) {
        let coefficients = pieces.iter().map(|p| p.coefficient(&target)).collect();
        system.push(coefficients, tau.coefficient(&target));
    }
    let Some(solution) = truncated_linear_solve(&system, bound)? else {
        return Ok(None);
    };
    let alpha = DifferentialForm::from_terms(n, n - 2, unknowns.into_iter().zip(solution));
    let residual = alpha.wedge(&inst.eta)?.sub(tau)?;
    if !residual.is_zero() {
        return Err(KoszulError::InternalInconsistency("lift residual is nonzero".into()));
    }
    Ok(Some(LiftResult { alpha, degree_bound_used: bound, residual }))
}

/// Vanishing orders on the two sides of `∂g_i/∂x_ℓ = Σ_m e_m · a_m(g(x))`.
/// `None` stands for the order of the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub i: usize,
    pub l: usize,
    pub lhs_order: Option<u32>,
    pub generator_orders: Vec<Option<u32>>,
    pub rhs_min_order: Option<u32>,
    /// The left side vanishes to strictly lower order than every
    /// generator on the right, so no such `e_m` can exist.
    pub contradiction: bool,
}

fn order(p: &Polynomial) -> Result<Option<u32>, KoszulError> {
    if p.is_zero() {
        Ok(None)
    } else {
        Ok(Some(p.vanishing_order()?))
    }
}

/// Indices are 0-based: `i < n` and `1 <= l < n`.
pub fn order_ledger(inst: &KoszulInstance, i: usize, l: usize) -> Result<OrderReport, KoszulError> {
    let n = inst.dim();
    if i >= n || l == 0 || l >= n {
        return Err(KoszulError::IndexOutOfRange(format!("i = {i}, l = {l}, n = {n}")));
    }
    let lhs_order = order(&inst.g.components()[i].partial_derivative(l)?)?;
    let generator_orders = (0..n).map(|m| order(&inst.composed(m))).collect::<Result<Vec<_>, _>>()?;
    let rhs_min_order = generator_orders.iter().flatten().min().copied();
    let contradiction = match (lhs_order, rhs_min_order) {
        (Some(lhs), Some(rhs)) => lhs < rhs,
        (Some(_), None) => true,
        (None, _) => false,
    };
    Ok(OrderReport { i, l, lhs_order, generator_orders, rhs_min_order, contradiction })
}

/// The data singled out from `g` before substituting `x_1 -> x_1^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderGap {
    /// Least total degree of a monomial free of `x_1`, over all components.
    pub d: u32,
    /// A component containing such a monomial.
    pub component: usize,
    pub monomial: Monomial,
    /// A variable other than `x_1` dividing the monomial.
    pub variable: usize,
    /// `N = d + 1`.
    pub power: u32,
}

/// Locates `d`, the component, the monomial and the variable. `None` if
/// every component is divisible by `x_1`, which a finite germ with `n >= 2`
/// rules out.
pub fn order_gap(g: &MapGerm) -> Option<OrderGap> {
    let mut best: Option<(u32, usize, Monomial)> = None;
    for (q, c) in g.components().iter().enumerate() {
        for (m, _) in c.terms() {
            if m.exponent(0) != 0 {
                continue;
            }
            let deg = m.degree();
            if best.as_ref().is_none_or(|(d, _, _)| deg < *d) {
                best = Some((deg, q, m.clone()));
            }
        }
    }
    let (d, component, monomial) = best?;
    let variable = (1..g.dim()).find(|&v| monomial.exponent(v) > 0)?;
    Some(OrderGap { d, component, monomial, variable, power: d + 1 })
}

/// Applies the substitution prescribed by [`order_gap`] and reports the
/// orders for the selected component and variable.
pub fn order_gap_ledger(inst: &KoszulInstance) -> Result<Option<(OrderGap, OrderReport)>, KoszulError> {
    let Some(gap) = order_gap(&inst.g) else {
        return Ok(None);
    };
    let substituted = inst.power_substitute(0, gap.power)?;
    let report = order_ledger(&substituted, gap.component, gap.variable)?;
    Ok(Some((gap, report)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_form_in, parse_polynomial_in, parse_polynomial_list, Family};

    fn map(s: &str, n: usize) -> MapGerm {
        MapGerm::new(parse_polynomial_list(s, n, Family::Source).unwrap()).unwrap()
    }

    fn ys(s: &str, n: usize) -> Vec<Polynomial> {
        parse_polynomial_list(s, n, Family::Target).unwrap()
    }

    fn form(s: &str, n: usize) -> DifferentialForm {
        parse_form_in(s, n, 'x').unwrap()
    }

    #[test]
    fn eta_examples() {
        let inst = build_eta(&MapGerm::identity(3), &ys("y1, y2, y3", 3)).unwrap();
        assert_eq!(inst.eta, form("x1 dx1 + x2 dx2 + x3 dx3", 3));
        let inst = build_eta(&map("x1^2, x2^2", 2), &ys("y1, y2", 2)).unwrap();
        assert_eq!(inst.eta, form("x1^2 dx1 + x2^2 dx2", 2));
        let inst = build_eta(&map("x1^2 - x2*x1, x2", 2), &ys("y2, y1", 2)).unwrap();
        assert_eq!(inst.eta, form("x2 dx1 + (x1^2 - x2*x1) dx2", 2));
        assert!(matches!(
            build_eta(&MapGerm::identity(2), &ys("y1", 2)[..1]),
            Err(KoszulError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_forms(&map("x1^2, x2", 2)), vec![form("dx1", 2)]);
        assert_eq!(tau_forms(&MapGerm::identity(2)), vec![form("dx1", 2)]);
        let taus = tau_forms(&map("x1, x2, x3^2", 3));
        assert_eq!(taus.len(), 2);
        assert_eq!(taus[0], form("-dx1^dx3", 3));
    }

    #[test]
    fn vanishing_examples() {
        let inst = build_eta(&map("x1^2 - x2^2, x2", 2), &ys("1, 0", 2)).unwrap();
        assert_eq!(vanishing_wedge_check(&inst).unwrap(), vec![false]);
        let inst = build_eta(&map("x1^2, x2", 2), &ys("1, 0", 2)).unwrap();
        assert_eq!(vanishing_wedge_check(&inst).unwrap(), vec![true]);
    }

    #[test]
    fn regular_sequences() {
        let id = build_eta(&MapGerm::identity(2), &ys("y1, y2", 2)).unwrap();
        assert!(regular_sequence_check(&id).unwrap());
        let inst = build_eta(&map("x1^2, x2^3", 2), &ys("y1, y2", 2)).unwrap();
        assert!(regular_sequence_check(&inst).unwrap());
        let inst = build_eta(&map("x1*x2, x2", 2), &ys("y1, y2", 2)).unwrap();
        assert!(!regular_sequence_check(&inst).unwrap());
        let unit = build_eta(&MapGerm::identity(2), &ys("1, y2", 2)).unwrap();
        assert!(!regular_sequence_check(&unit).unwrap());
    }

    #[test]
    fn lift_multiple_of_eta() {
        let inst = build_eta(&map("x1^2, x2^2", 2), &ys("y1, y2", 2)).unwrap();
        let tau = inst.eta.scale(&parse_polynomial_in("x1 + x2", 2, 'x').unwrap());
        let r = koszul_lift(&inst, &tau, 4).unwrap();
        assert_eq!(r.alpha, DifferentialForm::function(parse_polynomial_in("x1 + x2", 2, 'x').unwrap()));
        assert!(r.residual.is_zero());
    }

    #[test]
    fn lift_in_three_variables() {
        let inst = build_eta(&MapGerm::identity(3), &ys("y1, y2, y3", 3)).unwrap();
        let tau = form("x1 dx1^dx3 + x2 dx2^dx3", 3);
        let r = koszul_lift_escalating(&inst, &tau).unwrap();
        assert_eq!(r.alpha, form("-dx3", 3));
        assert_eq!(r.alpha.wedge(&inst.eta).unwrap(), tau);
    }

    #[test]
    fn degenerate_lift_is_guarded() {
        let inst = build_eta(&MapGerm::identity(2), &ys("y1, 0", 2)).unwrap();
        assert_eq!(koszul_lift(&inst, &form("dx1", 2), 4), Err(KoszulError::RegularSequenceFails));
        let inst = build_eta(&MapGerm::identity(2), &ys("y1, y2", 2)).unwrap();
        assert_eq!(koszul_lift(&inst, &form("dx1", 2), 4), Err(KoszulError::PreconditionWedgeNonzero));
    }

    #[test]
    fn ledger_examples() {
        let inst = build_eta(&map("x1^2 + x2^3, x2^2", 2), &ys("y1, y2", 2)).unwrap();
        let r = order_ledger(&inst, 0, 1).unwrap();
        assert_eq!((r.lhs_order, r.rhs_min_order, r.contradiction), (Some(2), Some(2), false));
        let inst = build_eta(&MapGerm::identity(2), &ys("y1^2, y2", 2)).unwrap();
        let r = order_ledger(&inst, 1, 1).unwrap();
        assert_eq!((r.lhs_order, r.contradiction), (Some(0), true));
        assert!(order_ledger(&inst, 0, 0).is_err());
    }

    #[test]
    fn order_gap_after_substitution() {
        let inst = build_eta(&map("x1 + x2^2, x2^3 + x1*x2", 2), &ys("y1, y2", 2)).unwrap();
        let (gap, report) = order_gap_ledger(&inst).unwrap().unwrap();
        assert_eq!((gap.d, gap.component, gap.variable, gap.power), (2, 0, 1, 3));
        assert_eq!(report.lhs_order, Some(1));
        assert_eq!(report.generator_orders, vec![Some(2), Some(3)]);
        assert!(report.contradiction);
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}
