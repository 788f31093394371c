use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::generate::{
    instance_rng, random_finite_map, random_singular_foliation, random_singular_hypersurface, GeneratorConfig,
};
use super::report::{Instance, VerificationReport};
use super::verify::{theorem_a_known_finite, theorem_b_known_finite};
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    /// Runs instances on the rayon pool; falls back to sequential when the
    /// `parallel` feature is off.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzOptions {
    pub execution: Execution,
    /// Timing makes the output nondeterministic, so it is off by default.
    pub record_timing: bool,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions { execution: Execution::Parallel, record_timing: false }
    }
}

/// Reports for one generated instance, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub theorem_a: Option<VerificationReport>,
    pub theorem_b: Option<VerificationReport>,
    pub errors: Vec<String>,
}

/// A failing instance and its greedily minimized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub index: usize,
    pub original: Instance,
    pub minimized: Instance,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub config: GeneratorConfig,
    pub theorem_a: Tally,
    pub theorem_b: Tally,
    pub regimes: BTreeMap<String, usize>,
    /// Nonconstant stripped factors as `(index, theorem, factor)`.
    pub stripped_factors: Vec<(usize, String, String)>,
    pub outcomes: Vec<InstanceOutcome>,
    pub reproducers: Vec<Reproducer>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.theorem_a.failed == 0 && self.theorem_b.failed == 0
    }

    /// A short human-readable account.
    pub fn human(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "fuzz n={} max_degree={} density={} seed={} count={}", c.n, c.max_degree, c.density, c.seed, c.count);
        for (name, t) in [("theorem A", &self.theorem_a), ("theorem B", &self.theorem_b)] {
            let _ = writeln!(s, "{name}: {} passed, {} failed, {} errors", t.passed, t.failed, t.errors);
        }
        for (regime, count) in &self.regimes {
            let _ = writeln!(s, "regime {regime}: {count}");
        }
        let _ = writeln!(s, "nontrivial stripped factors: {}", self.stripped_factors.len());
        for (index, theorem, factor) in &self.stripped_factors {
            let _ = writeln!(s, "  #{index} {theorem}: {factor}");
        }
        for r in &self.reproducers {
            let _ = writeln!(s, "FAILURE #{} {:?}: minimized to {}", r.index, r.failures, serde_json::to_string(&r.minimized).unwrap_or_default());
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(s, "elapsed: {ms:.1} ms");
        }
        s
    }

    /// One JSON record per verification report, in instance order.
    pub fn json_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for o in &self.outcomes {
            for (theorem, report) in [("A", &o.theorem_a), ("B", &o.theorem_b)] {
                if let Some(r) = report {
                    let record = serde_json::json!({ "index": o.index, "theorem": theorem, "report": r });
                    out.push(record.to_string());
                }
            }
            for e in &o.errors {
                out.push(serde_json::json!({ "index": o.index, "error": e }).to_string());
            }
        }
        out
    }
}

pub fn fuzz_theorems(cfg: &GeneratorConfig) -> Result<FuzzSummary, HarnessError> {
    fuzz_theorems_with(cfg, &FuzzOptions::default())
}

pub fn fuzz_theorems_with(cfg: &GeneratorConfig, options: &FuzzOptions) -> Result<FuzzSummary, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let run = |index: usize| run_instance(cfg, index, options.record_timing);
    let outcomes: Vec<InstanceOutcome> = match options.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.count).into_par_iter().map(run).collect()
        }
        _ => (0..cfg.count).map(run).collect(),
    };
    let mut summary = FuzzSummary {
        config: cfg.clone(),
        theorem_a: Tally::default(),
        theorem_b: Tally::default(),
        regimes: BTreeMap::new(),
        stripped_factors: Vec::new(),
        outcomes: Vec::new(),
        reproducers: Vec::new(),
        elapsed_ms: None,
    };
    for o in &outcomes {
        for (theorem, report, tally) in [
            ("A", &o.theorem_a, &mut summary.theorem_a),
            ("B", &o.theorem_b, &mut summary.theorem_b),
        ] {
            let Some(r) = report else {
                tally.errors += 1;
                continue;
            };
            if r.passed() {
                tally.passed += 1;
            } else {
                tally.failed += 1;
                summary.reproducers.push(Reproducer {
                    index: o.index,
                    original: r.inputs.clone(),
                    minimized: minimize(&r.inputs),
                    failures: r.failures().into_iter().map(String::from).collect(),
                });
            }
            if let Some(regime) = r.jacobian {
                *summary.regimes.entry(regime.label().to_string()).or_default() += 1;
            }
            for f in r.factors.iter().filter(|f| f.as_str() != "1") {
                summary.stripped_factors.push((o.index, theorem.to_string(), f.clone()));
            }
        }
    }
    summary.outcomes = outcomes;
    if options.record_timing {
        summary.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(summary)
}

fn run_instance(cfg: &GeneratorConfig, index: usize, timing: bool) -> InstanceOutcome {
    let mut outcome = InstanceOutcome { index, theorem_a: None, theorem_b: None, errors: Vec::new() };
    let mut rng = instance_rng(cfg.seed, index as u64);
    let generated = (|| {
        let g = random_finite_map(cfg, &mut rng)?;
        let x = random_singular_hypersurface(cfg, &mut rng)?;
        let f = random_singular_foliation(cfg, &mut rng)?;
        Ok::<_, HarnessError>((g, x, f))
    })();
    let (g, x, f) = match generated {
        Ok(t) => t,
        Err(e) => {
            outcome.errors.push(format!("generation: {e}"));
            return outcome;
        }
    };
    let timed = |r: Result<VerificationReport, HarnessError>, start: Instant| {
        r.map(|mut r| {
            if timing {
                r.timing = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            r
        })
    };
    let start = Instant::now();
    match timed(theorem_a_known_finite(&g, &x), start) {
        Ok(r) => outcome.theorem_a = Some(r),
        Err(e) => outcome.errors.push(format!("theorem A: {e}")),
    }
    let start = Instant::now();
    match timed(theorem_b_known_finite(&g, &f), start) {
        Ok(r) => outcome.theorem_b = Some(r),
        Err(e) => outcome.errors.push(format!("theorem B: {e}")),
    }
    outcome
}

/// Greedy term dropping: repeatedly takes the first single-term deletion
/// that still satisfies the preconditions and still fails.
pub(crate) fn minimize(instance: &Instance) -> Instance {
    minimize_by(instance, |candidate| matches!(candidate.run(), Ok(r) if !r.passed()))
}

fn minimize_by(instance: &Instance, still_fails: impl Fn(&Instance) -> bool) -> Instance {
    let mut current = instance.clone();
    'outer: loop {
        for candidate in current.term_deletions() {
            if still_fails(&candidate) {
                current = candidate;
                continue 'outer;
            }
        }
        return current;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries_are_deterministic() {
        let cfg = GeneratorConfig::new(2, 3, 11, 8);
        let seq = fuzz_theorems_with(&cfg, &FuzzOptions { execution: Execution::Sequential, record_timing: false }).unwrap();
        let par = fuzz_theorems_with(&cfg, &FuzzOptions { execution: Execution::Parallel, record_timing: false }).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.human(), par.human());
        assert_eq!(seq.json_lines(), par.json_lines());
        assert!(seq.all_passed());
        assert_eq!(seq.theorem_a.passed + seq.theorem_a.errors, 8);
    }

    #[test]
    fn minimizer_drops_irrelevant_terms() {
        let inst = Instance::TheoremA {
            n: 2,
            map: vec!["x1^2 + x1*x2 + x2^3".into(), "x2 + x1^2".into()],
            hypersurface: "y1^2 - y2^3 + y1*y2^2".into(),
        };
        // pretend failure: the first component still contains x1*x2
        let small = minimize_by(&inst, |c| match c {
            Instance::TheoremA { map, .. } => map[0].contains("x1*x2"),
            _ => false,
        });
        let Instance::TheoremA { map, hypersurface, .. } = small else { unreachable!() };
        assert_eq!(map, vec!["x1*x2".to_string(), "0".to_string()]);
        assert_eq!(hypersurface, "0");
    }

    #[test]
    fn outcomes_replay() {
        let cfg = GeneratorConfig::new(2, 3, 3, 3);
        let s = fuzz_theorems(&cfg).unwrap();
        for o in &s.outcomes {
            for r in [&o.theorem_a, &o.theorem_b].into_iter().flatten() {
                assert!(r.replay().unwrap().same_verdicts(r));
            }
        }
    }
}
