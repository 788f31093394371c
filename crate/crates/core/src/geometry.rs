//! Germs of finite maps, reduced hypersurfaces and codimension-one
//! foliations at the origin, with preimages and pullbacks.

use num_traits::Zero;
use thiserror::Error;

use crate::forms::{DifferentialForm, FormError};
use crate::ideals::{CancelToken, Ideal, IdealError};
use crate::poly::{Polynomial, PolyError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("a map germ needs at least one component")]
    EmptyMap,
    #[error("map component {index} does not vanish at the origin")]
    MapNotThroughOrigin { index: usize },
    #[error("defining polynomial is zero")]
    ZeroHypersurface,
    #[error("hypersurface does not pass through the origin")]
    HypersurfaceNotThroughOrigin,
    #[error("defining polynomial is not squarefree")]
    NotReduced,
    #[error("form must be a nonzero 1-form")]
    NotAOneForm,
    #[error("form is not integrable")]
    NotIntegrable,
    #[error("zero locus of the form has a codimension-one component")]
    ConditionTwoFails,
    #[error("map germ is not finite")]
    NotFinite,
    #[error("composition with the map is identically zero")]
    DegenerateImage,
    #[error("pullback of the form is identically zero")]
    DegeneratePullback,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// A polynomial map germ `(C^n, 0) -> (C^n, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MapGerm {
    components: Vec<Polynomial>,
}

impl MapGerm {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, GeometryError> {
        let n = components.len();
        if n == 0 {
            return Err(GeometryError::EmptyMap);
        }
        for (index, c) in components.iter().enumerate() {
            if c.nvars() != n {
                return Err(GeometryError::DimensionMismatch { left: n, right: c.nvars() });
            }
            if !c.constant_term().is_zero() {
                return Err(GeometryError::MapNotThroughOrigin { index });
            }
        }
        Ok(MapGerm { components })
    }

    pub fn identity(n: usize) -> Self {
        MapGerm { components: (0..n).map(|i| Polynomial::var(n, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapGerm) -> Result<MapGerm, GeometryError> {
        self.check_dim(inner.dim())?;
        let components =
            self.components.iter().map(|c| c.compose(&inner.components)).collect::<Result<_, _>>()?;
        Ok(MapGerm { components })
    }

    /// `g(x_1, .., x_var^n, .., x_n)`.
    pub fn power_substitute(&self, var: usize, n: u32) -> Result<MapGerm, GeometryError> {
        let components =
            self.components.iter().map(|c| c.power_substitute(var, n)).collect::<Result<_, _>>()?;
        Ok(MapGerm { components })
    }

    /// Pulls a function on the target back to the source.
    pub fn pull(&self, f: &Polynomial) -> Result<Polynomial, GeometryError> {
        self.check_dim(f.nvars())?;
        Ok(f.compose(&self.components)?)
    }

    fn check_dim(&self, other: usize) -> Result<(), GeometryError> {
        if other == self.dim() {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch { left: self.dim(), right: other })
        }
    }

    /// Whether the origin is an isolated point of `g^{-1}(0)`.
    pub fn is_finite(&self) -> Result<bool, GeometryError> {
        self.is_finite_with(&CancelToken::new())
    }

    pub fn is_finite_with(&self, cancel: &CancelToken) -> Result<bool, GeometryError> {
        Ok(Ideal::new(self.components.clone())?.origin_is_isolated_zero_with(cancel)?)
    }

    /// Sufficient test for finiteness, decided modulo a prime: `true` is
    /// proof, `false` is inconclusive.
    pub fn certainly_finite(&self) -> Result<bool, GeometryError> {
        Ok(Ideal::new(self.components.clone())?.origin_certainly_isolated(&CancelToken::new())?)
    }

    pub fn jacobian_matrix(&self) -> Vec<Vec<Polynomial>> {
        self.components.iter().map(|c| c.gradient()).collect()
    }

    pub fn jacobian_determinant(&self) -> Polynomial {
        determinant(&self.jacobian_matrix(), self.dim())
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    match m.len() {
        0 => Polynomial::one(nvars),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        k => {
            let mut acc = Polynomial::zero(nvars);
            for col in 0..k {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = &m[0][col] * &determinant(&minor, nvars);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Outcome of a singularity test at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityVerdict {
    pub is_singular_at_origin: bool,
    /// Values at the origin of the partials (hypersurfaces) or the form's
    /// coefficients (foliations); singular iff all vanish.
    pub witness: Vec<Rational>,
    /// Factor stripped by squarefree or primitive reduction, `1` if none.
    pub multiplicity_removed: Polynomial,
}

impl SingularityVerdict {
    fn from_values(witness: Vec<Rational>, removed: Polynomial) -> Self {
        let is_singular_at_origin = witness.iter().all(Zero::is_zero);
        SingularityVerdict { is_singular_at_origin, witness, multiplicity_removed: removed }
    }

    /// The verdict agrees with its own witness.
    pub fn is_consistent(&self) -> bool {
        self.is_singular_at_origin == self.witness.iter().all(Zero::is_zero)
    }
}

/// A reduced hypersurface germ `{ψ = 0}` through the origin. The defining
/// polynomial is kept as its canonical associate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypersurfaceGerm {
    defining: Polynomial,
}

impl HypersurfaceGerm {
    /// Validates that `psi` is squarefree and vanishes at the origin.
    pub fn new(psi: Polynomial) -> Result<Self, GeometryError> {
        if psi.is_zero() {
            return Err(GeometryError::ZeroHypersurface);
        }
        if !psi.constant_term().is_zero() {
            return Err(GeometryError::HypersurfaceNotThroughOrigin);
        }
        let canonical = psi.canonical();
        if canonical.squarefree_part()? != canonical {
            return Err(GeometryError::NotReduced);
        }
        Ok(HypersurfaceGerm { defining: canonical })
    }

    /// The reduced germ of `{p = 0}`.
    pub fn reduced(p: &Polynomial) -> Result<Self, GeometryError> {
        if p.is_zero() {
            return Err(GeometryError::ZeroHypersurface);
        }
        Self::new(p.squarefree_part()?)
    }

    pub fn dim(&self) -> usize {
        self.defining.nvars()
    }

    pub fn defining(&self) -> &Polynomial {
        &self.defining
    }

    pub fn singular_at_origin(&self) -> SingularityVerdict {
        let values = self.defining.gradient().iter().map(Polynomial::constant_term).collect();
        SingularityVerdict::from_values(values, Polynomial::one(self.dim()))
    }

    pub fn singular_locus(&self) -> Result<SingularLocus, GeometryError> {
        let mut gens = vec![self.defining.clone()];
        gens.extend(self.defining.gradient().into_iter().filter(|p| !p.is_zero()));
        let ideal = Ideal::new(gens)?;
        let partials_suffice = partials_cut_out_singular_locus(&self.defining)?;
        Ok(SingularLocus { ideal, partials_suffice })
    }

    /// The foliation `dψ = 0`, made primitive.
    pub fn foliation(&self) -> Result<FoliationGerm, GeometryError> {
        let d = DifferentialForm::function(self.defining.clone()).exterior_derivative();
        let (form, removed) = d.primitive_part()?;
        if !removed.is_constant() && removed.constant_term().is_zero() {
            return Err(GeometryError::ConditionTwoFails);
        }
        FoliationGerm::new(form)
    }
}

/// The ideal `⟨ψ, ∂ψ/∂x_1, …, ∂ψ/∂x_n⟩`, with a flag recording whether
/// dropping `ψ` leaves the zero set unchanged, i.e. `ψ` lies in the radical
/// of the ideal of partials.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularLocus {
    pub ideal: Ideal,
    pub partials_suffice: bool,
}

fn partials_cut_out_singular_locus(psi: &Polynomial) -> Result<bool, GeometryError> {
    let n = psi.nvars();
    let embed: Vec<usize> = (0..n).collect();
    let mut gens: Vec<Polynomial> =
        psi.gradient().iter().filter(|p| !p.is_zero()).map(|p| p.remap_variables(n + 1, &embed)).collect();
    let t = Polynomial::var(n + 1, n);
    gens.push(&Polynomial::one(n + 1) - &(&t * &psi.remap_variables(n + 1, &embed)));
    Ok(Ideal::new(gens)?.contains_one()?)
}

/// A codimension-one foliation germ given by an integrable 1-form whose
/// coefficients have no common factor. The form is kept canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FoliationGerm {
    form: DifferentialForm,
}

impl FoliationGerm {
    pub fn new(form: DifferentialForm) -> Result<Self, GeometryError> {
        if form.degree() != 1 || form.is_zero() {
            return Err(GeometryError::NotAOneForm);
        }
        if !form.is_integrable()? {
            return Err(GeometryError::NotIntegrable);
        }
        if !form.zero_locus_codim_ge_2()? {
            return Err(GeometryError::ConditionTwoFails);
        }
        Ok(FoliationGerm { form: form.canonical() })
    }

    pub fn dim(&self) -> usize {
        self.form.nvars()
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    pub fn singular_at_origin(&self) -> SingularityVerdict {
        let values = (0..self.dim()).map(|i| self.form.coefficient(&[i]).constant_term()).collect();
        SingularityVerdict::from_values(values, Polynomial::one(self.dim()))
    }
}

/// Reduced preimage of a hypersurface together with the stripped factor
/// `(ψ ∘ g) / squarefree_part(ψ ∘ g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimage {
    pub germ: HypersurfaceGerm,
    pub stripped_factor: Polynomial,
}

pub fn preimage_hypersurface(g: &MapGerm, x: &HypersurfaceGerm) -> Result<Preimage, GeometryError> {
    if !g.is_finite()? {
        return Err(GeometryError::NotFinite);
    }
    preimage_unchecked(g, x)
}

/// As [`preimage_hypersurface`], for callers that already know `g` is finite.
pub fn preimage_unchecked(g: &MapGerm, x: &HypersurfaceGerm) -> Result<Preimage, GeometryError> {
    let composed = g.pull(x.defining())?;
    if composed.is_zero() {
        return Err(GeometryError::DegenerateImage);
    }
    let reduced = composed.squarefree_part()?;
    let stripped_factor = composed.exact_div(&reduced)?.canonical();
    Ok(Preimage { germ: HypersurfaceGerm { defining: reduced }, stripped_factor })
}

/// The pulled-back form `g*ω`, the foliation `g#ω` it defines, and the
/// common factor removed between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PulledBackFoliation {
    pub raw: DifferentialForm,
    pub foliation: FoliationGerm,
    pub removed: Polynomial,
}

impl PulledBackFoliation {
    pub fn verdict(&self) -> SingularityVerdict {
        SingularityVerdict { multiplicity_removed: self.removed.clone(), ..self.foliation.singular_at_origin() }
    }
}

pub fn pullback_foliation(g: &MapGerm, f: &FoliationGerm) -> Result<PulledBackFoliation, GeometryError> {
    if !g.is_finite()? {
        return Err(GeometryError::NotFinite);
    }
    pullback_unchecked(g, f)
}

pub fn pullback_unchecked(g: &MapGerm, f: &FoliationGerm) -> Result<PulledBackFoliation, GeometryError> {
    g.check_dim(f.dim())?;
    let raw = f.form().pullback(g.components())?;
    if raw.is_zero() {
        return Err(GeometryError::DegeneratePullback);
    }
    let (primitive, removed) = raw.primitive_part()?;
    let foliation = FoliationGerm::new(primitive)?;
    Ok(PulledBackFoliation { raw, foliation, removed })
}

impl Preimage {
    pub fn verdict(&self) -> SingularityVerdict {
        SingularityVerdict { multiplicity_removed: self.stripped_factor.clone(), ..self.germ.singular_at_origin() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
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
    fn finiteness() {
        assert!(map(&["x1^2", "x2^3"]).is_finite().unwrap());
        assert!(!map(&["x1*x2", "x2"]).is_finite().unwrap());
        assert!(map(&["x1^2 - x2^2", "x2"]).is_finite().unwrap());
        assert_eq!(MapGerm::new(vec![x("x1 + 1", 2), x("x2", 2)]), Err(GeometryError::MapNotThroughOrigin { index: 0 }));
    }

    #[test]
    fn preimages() {
        let node = HypersurfaceGerm::new(y("y1*y2", 2)).unwrap();
        let pre = preimage_hypersurface(&map(&["x1^2", "x2"]), &node).unwrap();
        assert_eq!((pre.germ.defining().clone(), pre.stripped_factor), (x("x1*x2", 2), x("x1", 2)));
        let line = HypersurfaceGerm::new(y("y1", 2)).unwrap();
        let pre = preimage_hypersurface(&MapGerm::identity(2), &line).unwrap();
        assert_eq!(pre.germ.defining(), &x("x1", 2));
        let pre = preimage_hypersurface(&map(&["x1^2 - x2^2", "x2"]), &line).unwrap();
        assert_eq!(pre.germ.defining(), &x("x1^2 - x2^2", 2));
        assert!(pre.verdict().is_singular_at_origin);
        assert_eq!(preimage_hypersurface(&map(&["x1*x2", "x2"]), &line), Err(GeometryError::NotFinite));
    }

    #[test]
    fn hypersurface_validation() {
        assert_eq!(HypersurfaceGerm::new(y("y1^2", 2)), Err(GeometryError::NotReduced));
        assert_eq!(HypersurfaceGerm::new(y("y1 + 1", 2)), Err(GeometryError::HypersurfaceNotThroughOrigin));
        assert_eq!(HypersurfaceGerm::reduced(&y("y1^2*y2", 2)).unwrap().defining(), &y("y1*y2", 2));
    }

    #[test]
    fn hypersurface_singularity() {
        assert!(HypersurfaceGerm::new(y("y1^2 - y2^3", 2)).unwrap().singular_at_origin().is_singular_at_origin);
        let smooth = HypersurfaceGerm::new(y("y1", 2)).unwrap().singular_at_origin();
        assert!(!smooth.is_singular_at_origin);
        assert_eq!(smooth.witness, vec![rat(1), rat(0)]);
        let umbrella = HypersurfaceGerm::new(y("y1^2 - y2^2*y3", 3)).unwrap();
        assert!(umbrella.singular_at_origin().is_singular_at_origin);
    }

    #[test]
    fn singular_loci() {
        let umbrella = HypersurfaceGerm::new(y("y1^2 - y2^2*y3", 3)).unwrap().singular_locus().unwrap();
        assert!(!umbrella.ideal.contains_one().unwrap());
        let gb = umbrella.ideal.groebner(&crate::poly::TermOrder::grevlex(3)).unwrap();
        assert!(!gb.is_zero_dimensional());
        assert!(gb.contains(&y("y1", 3)).unwrap() && gb.contains(&y("y2^2", 3)).unwrap());
        assert!(umbrella.partials_suffice);
        let line = HypersurfaceGerm::new(y("y1", 2)).unwrap().singular_locus().unwrap();
        assert!(line.ideal.contains_one().unwrap());
        let node = HypersurfaceGerm::new(y("y1*y2", 2)).unwrap().singular_locus().unwrap();
        let gb = node.ideal.groebner(&crate::poly::TermOrder::grevlex(2)).unwrap();
        assert_eq!(gb.basis(), &[y("y2", 2), y("y1", 2)]);
    }

    #[test]
    fn partials_may_not_suffice() {
        let cubic = HypersurfaceGerm::new(y("y1^3 - 3*y1 + y2^2", 2)).unwrap();
        // partials 3y1^2 - 3, 2y2 vanish at (±1, 0) where ψ = ∓2
        assert!(!cubic.singular_locus().unwrap().partials_suffice);
    }

    #[test]
    fn foliations_from_hypersurfaces() {
        let cusp = HypersurfaceGerm::new(y("y1^2 - y2^3", 2)).unwrap().foliation().unwrap();
        assert_eq!(cusp.form(), &parse_form_in("2*y1 dy1 - 3*y2^2 dy2", 2, 'y').unwrap());
        assert!(cusp.singular_at_origin().is_singular_at_origin);
        let line = HypersurfaceGerm::new(y("y1", 2)).unwrap().foliation().unwrap();
        assert!(!line.singular_at_origin().is_singular_at_origin);
        let node = HypersurfaceGerm::new(y("y1*y2", 2)).unwrap().foliation().unwrap();
        assert_eq!(node.form(), &parse_form_in("y2 dy1 + y1 dy2", 2, 'y').unwrap());
    }

    #[test]
    fn foliation_pullbacks() {
        let dy1 = fol("dy1", 2);
        let r = pullback_foliation(&map(&["x1^2 - x2^2", "x2"]), &dy1).unwrap();
        assert_eq!(r.raw, parse_form_in("2*x1 dx1 - 2*x2 dx2", 2, 'x').unwrap());
        assert_eq!(r.foliation.form(), &parse_form_in("x1 dx1 - x2 dx2", 2, 'x').unwrap());
        assert!(r.verdict().is_singular_at_origin);
        let r = pullback_foliation(&MapGerm::identity(2), &dy1).unwrap();
        assert_eq!(r.foliation.form(), &parse_form_in("dx1", 2, 'x').unwrap());
        let r = pullback_foliation(&map(&["x1^2", "x2"]), &dy1).unwrap();
        assert_eq!(r.foliation.form(), &parse_form_in("dx1", 2, 'x').unwrap());
        assert_eq!(r.removed, x("x1", 2));
        assert!(!r.verdict().is_singular_at_origin);
    }

    #[test]
    fn foliation_validation() {
        let bad = parse_form_in("y3 dy1 + dy2", 3, 'y').unwrap();
        assert_eq!(FoliationGerm::new(bad), Err(GeometryError::NotIntegrable));
        let bad = parse_form_in("y1 dy1 + y1*y2 dy2", 2, 'y').unwrap();
        assert_eq!(FoliationGerm::new(bad), Err(GeometryError::ConditionTwoFails));
        assert!(fol("y2 dy1 + y1 dy2", 2).singular_at_origin().is_singular_at_origin);
        assert!(!fol("dy1", 2).singular_at_origin().is_singular_at_origin);
    }

    #[test]
    fn jacobians() {
        assert_eq!(map(&["x1^2", "x2"]).jacobian_determinant(), x("2*x1", 2));
        assert_eq!(MapGerm::identity(3).jacobian_determinant(), x("1", 3));
        assert_eq!(map(&["x1^2 - x2^2", "x2"]).jacobian_determinant(), x("2*x1", 2));
        let g = MapGerm::new(vec![x("x1*x2", 3), x("x2 + x3^2", 3), x("x1^2 + x3", 3)]).unwrap();
        // det [[x2, x1, 0], [0, 1, 2x3], [2x1, 0, 1]] = x2 - x1*(-4*x1*x3)
        assert_eq!(g.jacobian_determinant(), x("x2 + 4*x1^2*x3", 3));
    }
}
