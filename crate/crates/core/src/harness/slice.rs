use num_traits::Zero;

use crate::geometry::{determinant, preimage_unchecked, HypersurfaceGerm, MapGerm};
use crate::ideals::Ideal;
use crate::poly::{rat, ratio, Polynomial, Rational};
use crate::text::format_polynomial;

use super::report::{Check, Instance, VerificationReport};
use super::HarnessError;

/// Offsets `t` at which [`slice_samples`] cuts.
pub const SAMPLE_OFFSETS: [i64; 3] = [1, 2, -1];

/// The hyperplane `Σ normal_i y_i = offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    normal: Vec<Rational>,
    offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self, HarnessError> {
        if normal.iter().all(Zero::is_zero) {
            return Err(HarnessError::PreconditionViolated("hyperplane normal is zero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// `{y_var = offset}`.
    pub fn coordinate(n: usize, var: usize, offset: Rational) -> Self {
        let normal = (0..n).map(|i| rat(i64::from(i == var))).collect();
        Hyperplane { normal, offset }
    }

    pub fn normal(&self) -> &[Rational] {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn with_offset(&self, offset: Rational) -> Self {
        Hyperplane { normal: self.normal.clone(), offset }
    }

    /// `Σ normal_i y_i`.
    pub fn linear_form(&self) -> Polynomial {
        let n = self.normal.len();
        self.normal
            .iter()
            .enumerate()
            .fold(Polynomial::zero(n), |acc, (i, c)| &acc + &Polynomial::var(n, i).scale(c))
    }

    /// The last coordinate with a nonzero normal entry; it is solved for
    /// when restricting to the hyperplane.
    fn pivot(&self) -> usize {
        self.normal.iter().rposition(|c| !c.is_zero()).expect("nonzero normal")
    }

    /// Substitution expressing `y` on the hyperplane through the remaining
    /// `n - 1` coordinates, in order.
    fn parametrization(&self) -> Vec<Polynomial> {
        let n = self.normal.len();
        let k = self.pivot();
        let slot = |j: usize| if j < k { j } else { j - 1 };
        let mut solved = Polynomial::constant(n - 1, self.offset.clone());
        for (j, c) in self.normal.iter().enumerate() {
            if j != k && !c.is_zero() {
                solved = &solved - &Polynomial::var(n - 1, slot(j)).scale(c);
            }
        }
        let solved = solved.scale(&(rat(1) / &self.normal[k]));
        (0..n).map(|j| if j == k { solved.clone() } else { Polynomial::var(n - 1, slot(j)) }).collect()
    }

    /// Point of the hyperplane with the given slice coordinates.
    fn lift_point(&self, slice: &[Rational]) -> Vec<Rational> {
        self.parametrization().iter().map(|p| p.evaluate(slice)).collect()
    }
}

/// Whether `⟨p, ∂p⟩` is the unit ideal, after making `p` squarefree.
/// Empty and constant zero sets count as smooth.
fn hypersurface_is_smooth(p: &Polynomial) -> Result<bool, HarnessError> {
    if p.is_constant() {
        return Ok(!p.is_zero());
    }
    let r = p.squarefree_part()?;
    let mut gens = vec![r.clone()];
    gens.extend(r.gradient().into_iter().filter(|q| !q.is_zero()));
    Ok(Ideal::new(gens)?.contains_one()?)
}

/// A singular point of `{r = 0}` with small rational coordinates, trying
/// the origin first.
fn locate_singular_point(r: &Polynomial) -> Option<Vec<Rational>> {
    let n = r.nvars();
    let grid: Vec<Rational> =
        vec![rat(0), rat(1), rat(-1), rat(2), rat(-2), ratio(1, 2), ratio(-1, 2)];
    let partials = r.gradient();
    let mut index = vec![0usize; n];
    loop {
        let point: Vec<Rational> = index.iter().map(|&i| grid[i].clone()).collect();
        if r.evaluate(&point).is_zero() && partials.iter().all(|p| p.evaluate(&point).is_zero()) {
            return Some(point);
        }
        let mut pos = 0;
        while pos < n {
            index[pos] += 1;
            if index[pos] < grid.len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return None;
        }
    }
}

/// Whether `g^{-1}(p)` is a nonempty finite set of complex points. Only
/// there does the germ statement reach the located singular point: a
/// global polynomial map may miss `p` or have a curve over it.
fn fiber_is_finite_and_nonempty(g: &MapGerm, p: &[Rational]) -> Result<bool, HarnessError> {
    let n = g.dim();
    let gens = g.components().iter().zip(p).map(|(gi, c)| gi - &Polynomial::constant(n, c.clone())).collect();
    let gb = Ideal::new(gens)?.groebner(&crate::poly::TermOrder::grevlex(n))?;
    Ok(!gb.is_unit() && gb.is_zero_dimensional())
}

/// 2x2 minors of the Jacobian of `(p, q)`.
fn minors(p: &Polynomial, q: &Polynomial) -> Vec<Polynomial> {
    let (dp, dq) = (p.gradient(), q.gradient());
    let n = p.nvars();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = determinant(&[vec![dp[i].clone(), dp[j].clone()], vec![dq[i].clone(), dq[j].clone()]], n);
            if !m.is_zero() {
                out.push(m);
            }
        }
    }
    out
}

/// Cuts `X` and `g^{-1}(X)` by `H` and `g^{-1}(H)`.
///
/// Reports (1) whether `X ∩ H` is singular inside `H`, (2) whether
/// `g^{-1}(H)` is smooth, and (3) whether `g^{-1}(X ∩ H)` is smooth inside
/// `g^{-1}(H)`. When `g` is finite and `X` is singular at the origin,
/// (1) and (2) together force (3) to fail, provided the fiber of `g` over
/// the located singular point of `X ∩ H` is finite and nonempty; that
/// implication is the one required check. All three are global: no
/// neighborhood is shrunk.
pub fn slice_experiment(g: &MapGerm, x: &HypersurfaceGerm, h: &Hyperplane) -> Result<VerificationReport, HarnessError> {
    let n = g.dim();
    if x.dim() != n || h.normal.len() != n {
        return Err(HarnessError::PreconditionViolated("dimensions of map, hypersurface and hyperplane differ".into()));
    }
    let locus = x.singular_locus()?;
    if locus.ideal.groebner(&crate::poly::TermOrder::grevlex(n))?.is_zero_dimensional() {
        return Err(HarnessError::PreconditionViolated("singular locus is zero-dimensional".into()));
    }
    let mut report = VerificationReport::new(Instance::slice(g, x, h));

    let restricted = x.defining().compose(&h.parametrization())?;
    let slice_singular = !restricted.is_constant() && !hypersurface_is_smooth(&restricted)?;
    report.details.insert("restriction".into(), format_polynomial(&restricted, 'y'));
    let mut witness_fiber_finite = false;
    if slice_singular {
        let witness = locate_singular_point(&restricted.squarefree_part()?).map(|p| h.lift_point(&p));
        let text = match &witness {
            Some(p) => p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
            None => "not located on the grid".into(),
        };
        report.details.insert("slice_singular_point".into(), text);
        if let Some(p) = witness {
            witness_fiber_finite = fiber_is_finite_and_nonempty(g, &p)?;
        }
    }

    let cut = &g.pull(&h.linear_form())? - &Polynomial::constant(n, h.offset.clone());
    let hyperplane_preimage_smooth = hypersurface_is_smooth(&cut)?;

    let pre = preimage_unchecked(g, x)?;
    let phi = pre.germ.defining();
    let mut gens = vec![phi.clone(), cut.clone()];
    gens.extend(minors(phi, &cut));
    let slice_preimage_smooth = Ideal::new(gens)?.contains_one()?;

    let hypotheses = g.is_finite()? && x.singular_at_origin().is_singular_at_origin;
    report.verdicts.push(Check::observed("slice_singular", slice_singular));
    report.verdicts.push(Check::observed("hyperplane_preimage_smooth", hyperplane_preimage_smooth));
    report.verdicts.push(Check::observed("slice_preimage_smooth", slice_preimage_smooth));
    report.verdicts.push(Check::observed("theorem_a_hypotheses", hypotheses));
    report.verdicts.push(Check::observed("witness_fiber_finite", witness_fiber_finite));
    let forced = hypotheses && slice_singular && hyperplane_preimage_smooth && witness_fiber_finite;
    report.verdicts.push(Check::required("slice_preimage_singular_when_forced", !forced || !slice_preimage_smooth));
    report.factors.push(format_polynomial(&pre.stripped_factor, 'x'));
    Ok(report)
}

/// [`slice_experiment`] at each offset in [`SAMPLE_OFFSETS`].
pub fn slice_samples(g: &MapGerm, x: &HypersurfaceGerm, normal: &[Rational]) -> Result<Vec<VerificationReport>, HarnessError> {
    SAMPLE_OFFSETS
        .iter()
        .map(|&t| slice_experiment(g, x, &Hyperplane::new(normal.to_vec(), rat(t))?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_polynomial_in, parse_polynomial_list, Family};

    fn umbrella() -> HypersurfaceGerm {
        HypersurfaceGerm::new(parse_polynomial_in("y1^2 - y2^2*y3", 3, 'y').unwrap()).unwrap()
    }

    #[test]
    fn umbrella_under_identity() {
        let g = MapGerm::identity(3);
        let normal = Hyperplane::coordinate(3, 2, rat(0)).normal().to_vec();
        for r in slice_samples(&g, &umbrella(), &normal).unwrap() {
            assert_eq!(r.verdict("slice_singular"), Some(true));
            assert_eq!(r.verdict("hyperplane_preimage_smooth"), Some(true));
            assert_eq!(r.verdict("slice_preimage_smooth"), Some(false));
            assert!(r.passed());
        }
        let r = slice_experiment(&g, &umbrella(), &Hyperplane::coordinate(3, 2, rat(1))).unwrap();
        assert_eq!(r.details["restriction"], "-y1^2 + y2^2");
        assert_eq!(r.details["slice_singular_point"], "0, 0, 1");
    }

    #[test]
    fn umbrella_under_finite_map() {
        let g = MapGerm::new(parse_polynomial_list("x1 + x2^2, x2, x3^3", 3, Family::Source).unwrap()).unwrap();
        let r = slice_experiment(&g, &umbrella(), &Hyperplane::coordinate(3, 2, rat(2))).unwrap();
        assert_eq!(r.verdict("hyperplane_preimage_smooth"), Some(true));
        assert_eq!(r.verdict("slice_singular"), Some(true));
        assert_eq!(r.verdict("slice_preimage_smooth"), Some(false));
        assert!(r.passed());
        assert!(r.replay().unwrap().same_verdicts(&r));
    }

    #[test]
    fn unreached_singular_point_forces_nothing() {
        // `g` collapses `{x3 = -1}` onto the line `y1 = 3`, missing the node.
        let g = MapGerm::new(
            parse_polynomial_list("x1 - 3*x3 + x1*x3, x2^2 + 2*x1*x3 - 3*x1*x2, x3", 3, Family::Source).unwrap(),
        )
        .unwrap();
        let r = slice_experiment(&g, &umbrella(), &Hyperplane::coordinate(3, 2, rat(-1))).unwrap();
        assert_eq!(r.verdict("slice_singular"), Some(true));
        assert_eq!(r.verdict("hyperplane_preimage_smooth"), Some(true));
        assert_eq!(r.verdict("witness_fiber_finite"), Some(false));
        assert!(r.passed());
        let r = slice_experiment(&g, &umbrella(), &Hyperplane::coordinate(3, 2, rat(1))).unwrap();
        assert_eq!(r.verdict("witness_fiber_finite"), Some(true));
        assert_eq!(r.verdict("slice_preimage_smooth"), Some(false));
    }

    #[test]
    fn isolated_singularity_is_rejected() {
        let cusp = HypersurfaceGerm::new(parse_polynomial_in("y1^2 - y2^3", 2, 'y').unwrap()).unwrap();
        let h = Hyperplane::coordinate(2, 1, rat(1));
        assert!(matches!(slice_experiment(&MapGerm::identity(2), &cusp, &h), Err(HarnessError::PreconditionViolated(_))));
    }

    #[test]
    fn oblique_parametrization() {
        let h = Hyperplane::new(vec![rat(1), rat(2), rat(0)], rat(4)).unwrap();
        let p = h.lift_point(&[rat(2), rat(5)]);
        assert_eq!(p, vec![rat(2), rat(1), rat(5)]);
        assert!(Hyperplane::new(vec![rat(0); 3], rat(1)).is_err());
    }
}
