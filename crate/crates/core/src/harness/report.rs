use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::forms::DifferentialForm;
use crate::geometry::{FoliationGerm, HypersurfaceGerm, MapGerm};
use crate::poly::{Polynomial, Rational};
use crate::text::{format_form, format_polynomial, parse_form_in, parse_polynomial_in};

use super::slice::{slice_experiment, Hyperplane};
use super::verify::{verify_theorem_a, verify_theorem_b};
use super::HarnessError;

/// A self-contained description of a checked instance, in the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    TheoremA { n: usize, map: Vec<String>, hypersurface: String },
    TheoremB { n: usize, map: Vec<String>, form: String },
    Slice { n: usize, map: Vec<String>, hypersurface: String, normal: Vec<String>, offset: String },
}

fn map_text(g: &MapGerm) -> Vec<String> {
    g.components().iter().map(|c| format_polynomial(c, 'x')).collect()
}

fn parse_map(n: usize, parts: &[String]) -> Result<MapGerm, HarnessError> {
    let comps = parts
        .iter()
        .map(|s| parse_polynomial_in(s, n, 'x'))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| HarnessError::Replay(e.to_string()))?;
    Ok(MapGerm::new(comps)?)
}

fn parse_target(n: usize, s: &str) -> Result<Polynomial, HarnessError> {
    parse_polynomial_in(s, n, 'y').map_err(|e| HarnessError::Replay(e.to_string()))
}

fn parse_rational(s: &str) -> Result<Rational, HarnessError> {
    s.trim().parse::<Rational>().map_err(|e| HarnessError::Replay(format!("{s}: {e}")))
}

/// Drops the term `k` (in iteration order) of `p`.
fn drop_term(p: &Polynomial, k: usize) -> Polynomial {
    Polynomial::from_terms(p.nvars(), p.terms().enumerate().filter(|(i, _)| *i != k).map(|(_, (m, c))| (m.clone(), c.clone())))
}

fn map_deletions(n: usize, map: &[String]) -> Vec<Vec<String>> {
    let Ok(g) = parse_map(n, map) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, c) in g.components().iter().enumerate() {
        for k in 0..c.len() {
            let mut parts = map.to_vec();
            parts[i] = format_polynomial(&drop_term(c, k), 'x');
            out.push(parts);
        }
    }
    out
}

impl Instance {
    pub fn theorem_a(g: &MapGerm, x: &HypersurfaceGerm) -> Self {
        Instance::TheoremA { n: g.dim(), map: map_text(g), hypersurface: format_polynomial(x.defining(), 'y') }
    }

    pub fn theorem_b(g: &MapGerm, f: &FoliationGerm) -> Self {
        Instance::TheoremB { n: g.dim(), map: map_text(g), form: format_form(f.form(), 'y') }
    }

    pub fn slice(g: &MapGerm, x: &HypersurfaceGerm, h: &Hyperplane) -> Self {
        Instance::Slice {
            n: g.dim(),
            map: map_text(g),
            hypersurface: format_polynomial(x.defining(), 'y'),
            normal: h.normal().iter().map(|c| c.to_string()).collect(),
            offset: h.offset().to_string(),
        }
    }

    /// Re-runs the check this instance describes.
    pub fn run(&self) -> Result<VerificationReport, HarnessError> {
        match self {
            Instance::TheoremA { n, map, hypersurface } => {
                let x = HypersurfaceGerm::new(parse_target(*n, hypersurface)?)?;
                verify_theorem_a(&parse_map(*n, map)?, &x)
            }
            Instance::TheoremB { n, map, form } => {
                let form = parse_form_in(form, *n, 'y').map_err(|e| HarnessError::Replay(e.to_string()))?;
                verify_theorem_b(&parse_map(*n, map)?, &FoliationGerm::new(form)?)
            }
            Instance::Slice { n, map, hypersurface, normal, offset } => {
                let x = HypersurfaceGerm::new(parse_target(*n, hypersurface)?)?;
                let normal = normal.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                let h = Hyperplane::new(normal, parse_rational(offset)?)?;
                slice_experiment(&parse_map(*n, map)?, &x, &h)
            }
        }
    }

    /// Every instance obtained by deleting a single term from one of the
    /// polynomials, for greedy minimization.
    pub fn term_deletions(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        match self {
            Instance::TheoremA { n, map, hypersurface } => {
                for m in map_deletions(*n, map) {
                    out.push(Instance::TheoremA { n: *n, map: m, hypersurface: hypersurface.clone() });
                }
                if let Ok(p) = parse_target(*n, hypersurface) {
                    for k in 0..p.len() {
                        let hypersurface = format_polynomial(&drop_term(&p, k), 'y');
                        out.push(Instance::TheoremA { n: *n, map: map.clone(), hypersurface });
                    }
                }
            }
            Instance::TheoremB { n, map, form } => {
                for m in map_deletions(*n, map) {
                    out.push(Instance::TheoremB { n: *n, map: m, form: form.clone() });
                }
                if let Ok(f) = parse_form_in(form, *n, 'y') {
                    for (idx, c) in f.terms() {
                        for k in 0..c.len() {
                            let terms = f
                                .terms()
                                .map(|(j, d)| (j.to_vec(), if j == idx { drop_term(d, k) } else { d.clone() }));
                            let smaller = DifferentialForm::from_terms(*n, 1, terms);
                            out.push(Instance::TheoremB { n: *n, map: map.clone(), form: format_form(&smaller, 'y') });
                        }
                    }
                }
            }
            Instance::Slice { .. } => {}
        }
        out
    }
}

/// One named verdict. `required` checks must hold on every valid input;
/// the others are observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub required: bool,
}

impl Check {
    pub(crate) fn required(name: &str, holds: bool) -> Self {
        Check { name: name.into(), holds, required: true }
    }

    pub(crate) fn observed(name: &str, holds: bool) -> Self {
        Check { name: name.into(), holds, required: false }
    }
}

/// Whether `det(Dg)` vanishes identically on some component of the reduced
/// preimage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianRegime {
    DetNonvanishing,
    DetVanishesIdentically,
}

impl JacobianRegime {
    pub fn label(self) -> &'static str {
        match self {
            JacobianRegime::DetNonvanishing => "det_nonvanishing",
            JacobianRegime::DetVanishesIdentically => "det_vanishes_identically",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inputs: Instance,
    pub verdicts: Vec<Check>,
    /// Factors stripped when reducing, in the source variables.
    pub factors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jacobian: Option<JacobianRegime>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub details: BTreeMap<String, String>,
    /// Wall time in milliseconds, when recorded.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<f64>,
}

impl VerificationReport {
    pub(crate) fn new(inputs: Instance) -> Self {
        VerificationReport {
            inputs,
            verdicts: Vec::new(),
            factors: Vec::new(),
            jacobian: None,
            details: BTreeMap::new(),
            timing: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|c| !c.required || c.holds)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|c| c.required && !c.holds).map(|c| c.name.as_str()).collect()
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts.iter().find(|c| c.name == name).map(|c| c.holds)
    }

    /// Recomputes the report from the stored instance.
    pub fn replay(&self) -> Result<VerificationReport, HarnessError> {
        self.inputs.run()
    }

    /// Equality ignoring timing.
    pub fn same_verdicts(&self, other: &VerificationReport) -> bool {
        VerificationReport { timing: None, ..self.clone() } == VerificationReport { timing: None, ..other.clone() }
    }
}
