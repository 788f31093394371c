use crate::geometry::{
    preimage_unchecked, pullback_unchecked, FoliationGerm, GeometryError, HypersurfaceGerm, MapGerm,
};
use crate::koszul::{vanishing_wedge_check, KoszulInstance};
use crate::text::format_polynomial;

use super::report::{Check, Instance, JacobianRegime, VerificationReport};
use super::HarnessError;

fn require_finite(g: &MapGerm) -> Result<(), HarnessError> {
    if g.is_finite()? {
        Ok(())
    } else {
        Err(HarnessError::NotFinite)
    }
}

fn check_dims(g: &MapGerm, n: usize) -> Result<(), HarnessError> {
    if g.dim() == n {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { left: g.dim(), right: n }.into())
    }
}

/// Reduced preimage of a singular hypersurface under a finite germ, which
/// must again be singular at the origin.
pub fn verify_theorem_a(g: &MapGerm, x: &HypersurfaceGerm) -> Result<VerificationReport, HarnessError> {
    check_dims(g, x.dim())?;
    if !x.singular_at_origin().is_singular_at_origin {
        return Err(HarnessError::InputNotSingular);
    }
    require_finite(g)?;
    theorem_a_known_finite(g, x)
}

pub(crate) fn theorem_a_known_finite(g: &MapGerm, x: &HypersurfaceGerm) -> Result<VerificationReport, HarnessError> {
    let pre = preimage_unchecked(g, x)?;
    let verdict = pre.verdict();
    let mut report = VerificationReport::new(Instance::theorem_a(g, x));
    report.verdicts.push(Check::required("preimage_singular_at_origin", verdict.is_singular_at_origin));
    report.verdicts.push(Check::required("verdict_matches_witness", verdict.is_consistent()));
    report.factors.push(format_polynomial(&pre.stripped_factor, 'x'));
    report.details.insert("preimage".into(), format_polynomial(pre.germ.defining(), 'x'));
    let det = g.jacobian_determinant();
    let vanishes = det.is_zero() || !pre.germ.defining().gcd(&det)?.is_constant();
    report.jacobian =
        Some(if vanishes { JacobianRegime::DetVanishesIdentically } else { JacobianRegime::DetNonvanishing });
    Ok(report)
}

/// Pullback of a singular foliation under a finite germ, which must again
/// be singular at the origin.
pub fn verify_theorem_b(g: &MapGerm, f: &FoliationGerm) -> Result<VerificationReport, HarnessError> {
    check_dims(g, f.dim())?;
    if !f.singular_at_origin().is_singular_at_origin {
        return Err(HarnessError::InputNotSingular);
    }
    require_finite(g)?;
    theorem_b_known_finite(g, f)
}

pub(crate) fn theorem_b_known_finite(g: &MapGerm, f: &FoliationGerm) -> Result<VerificationReport, HarnessError> {
    let pulled = pullback_unchecked(g, f)?;
    let verdict = pulled.verdict();
    let mut report = VerificationReport::new(Instance::theorem_b(g, f));
    report.verdicts.push(Check::required("pullback_singular_at_origin", verdict.is_singular_at_origin));
    report.verdicts.push(Check::required("verdict_matches_witness", verdict.is_consistent()));
    // the three computations of the pullback coefficients must agree
    let inst = KoszulInstance::from_foliation(g, f).map_err(|e| HarnessError::PreconditionViolated(e.to_string()))?;
    let agree = vanishing_wedge_check(&inst).is_ok();
    report.verdicts.push(Check::required("pullback_coefficients_agree", agree));
    report.factors.push(format_polynomial(&pulled.removed, 'x'));
    report.details.insert("pullback".into(), crate::text::format_form(pulled.foliation.form(), 'x'));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_form_in, parse_polynomial_in, parse_polynomial_list, Family};

    fn map(s: &str, n: usize) -> MapGerm {
        MapGerm::new(parse_polynomial_list(s, n, Family::Source).unwrap()).unwrap()
    }

    fn hyp(s: &str, n: usize) -> HypersurfaceGerm {
        HypersurfaceGerm::new(parse_polynomial_in(s, n, 'y').unwrap()).unwrap()
    }

    fn fol(s: &str, n: usize) -> FoliationGerm {
        FoliationGerm::new(parse_form_in(s, n, 'y').unwrap()).unwrap()
    }

    #[test]
    fn theorem_a_examples() {
        let r = verify_theorem_a(&map("x1^2, x2", 2), &hyp("y1*y2", 2)).unwrap();
        assert!(r.passed());
        assert_eq!(r.details["preimage"], "x1*x2");
        assert_eq!(r.factors, vec!["x1"]);
        assert_eq!(r.jacobian, Some(JacobianRegime::DetVanishesIdentically));
        let r = verify_theorem_a(&MapGerm::identity(2), &hyp("y1^2 - y2^3", 2)).unwrap();
        assert!(r.passed());
        assert_eq!(r.jacobian, Some(JacobianRegime::DetNonvanishing));
        let r = verify_theorem_a(&map("x1^3, x2", 2), &hyp("y1*y2", 2)).unwrap();
        assert_eq!(r.details["preimage"], "x1*x2");
        assert_eq!(r.factors, vec!["x1^2"]);
    }

    #[test]
    fn theorem_a_rejects_bad_inputs() {
        assert_eq!(verify_theorem_a(&MapGerm::identity(2), &hyp("y1 + y2^2", 2)), Err(HarnessError::InputNotSingular));
        assert_eq!(verify_theorem_a(&map("x1*x2, x2", 2), &hyp("y1*y2", 2)), Err(HarnessError::NotFinite));
    }

    #[test]
    fn theorem_b_examples() {
        let r = verify_theorem_b(&map("x1^2 - x2^2, x2", 2), &fol("y2 dy1 + y1 dy2", 2)).unwrap();
        assert!(r.passed());
        let r = verify_theorem_b(&MapGerm::identity(2), &fol("y2 dy1 + y1 dy2", 2)).unwrap();
        assert!(r.passed());
        assert_eq!(r.details["pullback"], "x2 dx1 + x1 dx2");
        let r = verify_theorem_b(&map("x2, x1", 2), &fol("2*y1 dy1 - 3*y2^2 dy2", 2)).unwrap();
        assert!(r.passed());
        assert_eq!(verify_theorem_b(&MapGerm::identity(2), &fol("dy1", 2)), Err(HarnessError::InputNotSingular));
    }

    #[test]
    fn reports_replay() {
        let r = verify_theorem_b(&map("x1^2 - x2^2, x2", 2), &fol("y2 dy1 + y1 dy2", 2)).unwrap();
        assert!(r.replay().unwrap().same_verdicts(&r));
        let r = verify_theorem_a(&map("x1^2, x2", 2), &hyp("y1*y2", 2)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(back.replay().unwrap().same_verdicts(&r));
    }
}
