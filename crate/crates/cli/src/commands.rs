//! One function per subcommand, each returning the records to print.

use std::fmt::Display;
use std::time::Instant;

use serde_json::{json, Value};

use germtools::geometry::{preimage_hypersurface, pullback_foliation, GeometryError};
use germtools::harness::{
    fuzz_theorems_with, slice_experiment, slice_samples, Execution, FuzzOptions, GeneratorConfig, HarnessError,
    Hyperplane, InstanceOutcome, VerificationReport,
};
use germtools::koszul::{
    self, build_eta, koszul_lift_escalating, order_ledger, tau_forms, KoszulError, KoszulInstance,
};
use germtools::poly::TermOrder;
use germtools::text::{format_form, format_polynomial, format_polynomial_list};
use germtools::trace::{tangency_check, FiberAlgebra, TraceError};
use germtools::DifferentialForm;

use crate::input::Document;
use crate::record::Record;
use crate::CliError;

fn invalid(e: impl Display) -> CliError {
    CliError::validation(e.to_string())
}

fn koszul_error(e: KoszulError) -> CliError {
    match e {
        KoszulError::InternalInconsistency(_) => CliError::internal(e.to_string()),
        other => invalid(other),
    }
}

fn trace_error(e: TraceError) -> CliError {
    invalid(e)
}

fn geometry_error(e: GeometryError) -> CliError {
    invalid(e)
}

fn harness_error(e: HarnessError) -> CliError {
    invalid(e)
}

fn stamp(record: &mut Record, start: Instant, timing: bool) {
    if timing {
        record.timing = Some(start.elapsed().as_secs_f64() * 1e3);
    }
}

fn verdict_word(singular: bool) -> &'static str {
    if singular {
        "SINGULAR"
    } else {
        "SMOOTH"
    }
}

pub fn preimage(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let g = doc.map()?;
    let x = doc.hypersurface()?;
    let input = x.singular_at_origin();
    let pre = preimage_hypersurface(&g, &x).map_err(geometry_error)?;
    let verdict = pre.germ.singular_at_origin();
    let defining = format_polynomial(pre.germ.defining(), 'x');
    let stripped = format_polynomial(&pre.stripped_factor, 'x');

    let mut r = Record::new("preimage", doc.inputs());
    r.result("preimage", defining.clone())
        .result("verdict", verdict_word(verdict.is_singular_at_origin))
        .result("stripped_factor", stripped.clone())
        .observed("input_singular_at_origin", input.is_singular_at_origin)
        .observed("preimage_singular_at_origin", verdict.is_singular_at_origin)
        .required("preimage_singular_when_input_singular", !input.is_singular_at_origin || verdict.is_singular_at_origin)
        .required("verdict_matches_witness", verdict.is_consistent());
    r.factors.push(stripped.clone());
    r.line(format!("preimage: {defining}"))
        .line(format!("verdict: {}", verdict_word(verdict.is_singular_at_origin)))
        .line(format!("stripped factor: {stripped}"));
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

pub fn pullback(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let g = doc.map()?;
    let f = doc.foliation()?;
    let input = f.singular_at_origin();
    let pulled = pullback_foliation(&g, &f).map_err(geometry_error)?;
    let verdict = pulled.verdict();
    let raw = format_form(&pulled.raw, 'x');
    let primitive = format_form(pulled.foliation.form(), 'x');
    let removed = format_polynomial(&pulled.removed, 'x');
    let word = if verdict.is_singular_at_origin { "SINGULAR AT ORIGIN" } else { "NONSINGULAR AT ORIGIN" };

    let mut r = Record::new("pullback-foliation", doc.inputs());
    r.result("pullback", raw.clone())
        .result("foliation", primitive.clone())
        .result("removed_factor", removed.clone())
        .result("verdict", word)
        .observed("input_singular_at_origin", input.is_singular_at_origin)
        .observed("pullback_singular_at_origin", verdict.is_singular_at_origin)
        .required("pullback_singular_when_input_singular", !input.is_singular_at_origin || verdict.is_singular_at_origin)
        .required("verdict_matches_witness", verdict.is_consistent());
    r.factors.push(removed.clone());
    r.line(format!("pullback: {raw}"))
        .line(format!("foliation: {primitive}"))
        .line(format!("removed factor: {removed}"))
        .line(word);
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

pub fn singular_locus(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let x = doc.hypersurface()?;
    let n = x.dim();
    let locus = x.singular_locus().map_err(geometry_error)?;
    let gb = locus.ideal.groebner(&TermOrder::grevlex(n)).map_err(invalid)?;
    let verdict = x.singular_at_origin();
    let mut r = Record::new("singular-locus", doc.inputs());
    r.result("generators", format_polynomial_list(locus.ideal.generators(), 'y'))
        .result("groebner_basis", format_polynomial_list(gb.basis(), 'y'))
        .result("empty", gb.is_unit())
        .result("zero_dimensional", gb.is_zero_dimensional())
        .result("partials_suffice", locus.partials_suffice)
        .result("verdict", verdict_word(verdict.is_singular_at_origin))
        .observed("singular_at_origin", verdict.is_singular_at_origin)
        .required("verdict_matches_witness", verdict.is_consistent());
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

pub fn finite_check(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let g = doc.map()?;
    let finite = g.is_finite().map_err(geometry_error)?;
    let mut r = Record::new("finite-check", doc.inputs());
    r.result("finite", finite);
    if finite {
        match FiberAlgebra::new(&g) {
            Ok(algebra) => r.result("degree", algebra.degree()),
            Err(e) => r.result("degree", format!("unavailable: {e}")),
        };
    }
    r.result("jacobian_determinant", format_polynomial(&g.jacobian_determinant(), 'x'));
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

pub fn trace(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let g = doc.map()?;
    let p = doc.source_polynomial("poly")?;
    let algebra = FiberAlgebra::new(&g).map_err(trace_error)?;
    let pushed = algebra.trace(&p).map_err(trace_error)?;
    let mut r = Record::new("trace", doc.inputs());
    r.result("pushforward", format_polynomial(&pushed, 'y')).result("degree", algebra.degree());
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

pub fn tangency(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let start = Instant::now();
    let psi = doc.target_polynomial("hypersurface")?;
    let form = doc.target_form("form")?;
    let tangent = tangency_check(&psi, &form).map_err(trace_error)?;
    let mut r = Record::new("tangency", doc.inputs());
    r.result("tangent", tangent).line(format!("tangent: {tangent}"));
    stamp(&mut r, start, timing);
    Ok(vec![r])
}

fn parse_order(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let parsed: Vec<usize> = parts.iter().filter_map(|p| p.parse().ok()).collect();
    match parsed[..] {
        [i, l] if parts.len() == 2 && i >= 1 && l >= 1 => Ok((i - 1, l - 1)),
        _ => Err(CliError::validation(format!("--order expects `I,L` with 1-based indices, got `{text}`"))),
    }
}

fn order_or_null(o: Option<u32>) -> Value {
    o.map_or(Value::Null, Value::from)
}

/// The τ to lift: explicit forms, an index into the τ_l, or all of them.
fn taus(doc: &Document, inst: &KoszulInstance) -> Result<Vec<(String, DifferentialForm)>, CliError> {
    let n = inst.dim();
    let all = tau_forms(&inst.g);
    match doc.raw("tau") {
        None => Ok(all.into_iter().enumerate().map(|(k, t)| (format!("tau_{}", k + 2), t)).collect()),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(l) if (2..=n).contains(&l) => Ok(vec![(format!("tau_{l}"), all[l - 2].clone())]),
            Ok(l) => Err(CliError::validation(format!("tau index {l} outside 2..={n}"))),
            Err(_) => Ok(vec![("given".to_string(), doc.source_form("tau")?)]),
        },
    }
}

pub fn koszul_lift(doc: &Document, bound: Option<u32>, order: Option<&str>, timing: bool) -> Result<Vec<Record>, CliError> {
    let g = doc.map()?;
    let a = doc.coeffs()?;
    if a.len() != g.dim() {
        return Err(CliError::validation(format!("{} coefficients for dimension {}", a.len(), g.dim())));
    }
    let inst = build_eta(&g, &a).map_err(koszul_error)?;
    let eta = format_form(&inst.eta, 'x');
    if let Some(text) = order {
        let start = Instant::now();
        let (i, l) = parse_order(text)?;
        let rep = order_ledger(&inst, i, l).map_err(koszul_error)?;
        let mut r = Record::new("koszul-lift", doc.inputs());
        r.result("eta", eta)
            .result("component", i + 1)
            .result("derivative", l + 1)
            .result("lhs_order", order_or_null(rep.lhs_order))
            .result("generator_orders", Value::from(rep.generator_orders.iter().map(|o| order_or_null(*o)).collect::<Vec<_>>()))
            .result("rhs_min_order", order_or_null(rep.rhs_min_order))
            .observed("contradiction", rep.contradiction);
        stamp(&mut r, start, timing);
        return Ok(vec![r]);
    }
    let mut out = Vec::new();
    for (label, tau) in taus(doc, &inst)? {
        let start = Instant::now();
        let lift = match bound {
            Some(b) => koszul::koszul_lift(&inst, &tau, b),
            None => koszul_lift_escalating(&inst, &tau),
        }
        .map_err(koszul_error)?;
        let mut inputs = doc.inputs();
        if label != "given" {
            inputs["tau"] = json!(label);
        }
        let mut r = Record::new("koszul-lift", inputs);
        r.result("eta", eta.clone())
            .result("tau", format_form(&tau, 'x'))
            .result("alpha", format_form(&lift.alpha, 'x'))
            .result("degree_bound_used", lift.degree_bound_used)
            .result("residual", format_form(&lift.residual, 'x'))
            .required("residual_is_zero", lift.residual.is_zero());
        stamp(&mut r, start, timing);
        out.push(r);
    }
    Ok(out)
}

fn report_record(command: &str, inputs: Value, report: &VerificationReport) -> Record {
    let mut r = Record::new(command, inputs);
    for (k, v) in &report.details {
        r.result(k, v.clone());
    }
    for c in &report.verdicts {
        if c.required {
            r.required(&c.name, c.holds);
        } else {
            r.observed(&c.name, c.holds);
        }
    }
    r.factors = report.factors.clone();
    r.timing = report.timing;
    r
}

pub fn slice(doc: &Document, timing: bool) -> Result<Vec<Record>, CliError> {
    let g = doc.map()?;
    let x = doc.hypersurface()?;
    let normal = doc.rationals("normal")?.ok_or_else(|| CliError::validation("missing --normal"))?;
    if normal.len() != g.dim() {
        return Err(CliError::validation(format!("normal has {} entries, dimension is {}", normal.len(), g.dim())));
    }
    let start = Instant::now();
    let reports = match doc.rationals("offset")? {
        Some(t) if t.len() == 1 => {
            let h = Hyperplane::new(normal, t[0].clone()).map_err(harness_error)?;
            vec![slice_experiment(&g, &x, &h).map_err(harness_error)?]
        }
        Some(_) => return Err(CliError::validation("--offset takes one rational")),
        None => slice_samples(&g, &x, &normal).map_err(harness_error)?,
    };
    let elapsed = timing.then(|| start.elapsed().as_secs_f64() * 1e3 / reports.len() as f64);
    Ok(reports
        .iter()
        .map(|rep| {
            let mut inputs = doc.inputs();
            if let germtools::harness::Instance::Slice { offset, .. } = &rep.inputs {
                inputs["offset"] = json!(offset);
            }
            let mut r = report_record("slice", inputs, rep);
            r.timing = elapsed;
            r
        })
        .collect())
}

pub struct FuzzArgs {
    pub count: usize,
    pub seed: u64,
    pub degree: u32,
    pub density: u32,
    pub sequential: bool,
}

fn outcome_record(cfg: &GeneratorConfig, o: &InstanceOutcome) -> Record {
    let mut inputs = json!({
        "index": o.index,
        "seed": cfg.seed,
        "dim": cfg.n,
        "degree": cfg.max_degree,
        "density": cfg.density,
    });
    let mut r = Record::new("fuzz", Value::Null);
    let mut total = None::<f64>;
    for (tag, report) in [("theorem_a", &o.theorem_a), ("theorem_b", &o.theorem_b)] {
        let Some(rep) = report else { continue };
        inputs[tag] = serde_json::to_value(&rep.inputs).expect("instance serializes");
        for (k, v) in &rep.details {
            r.result(&format!("{tag}.{k}"), v.clone());
        }
        if let Some(regime) = rep.jacobian {
            r.result(&format!("{tag}.jacobian"), regime.label());
        }
        for c in &rep.verdicts {
            let name = format!("{tag}.{}", c.name);
            if c.required {
                r.required(&name, c.holds);
            } else {
                r.observed(&name, c.holds);
            }
        }
        r.factors.extend(rep.factors.iter().cloned());
        if let Some(t) = rep.timing {
            total = Some(total.unwrap_or(0.0) + t);
        }
    }
    if !o.errors.is_empty() {
        r.result("errors", Value::from(o.errors.clone()));
    }
    r.inputs = inputs;
    r.timing = total;
    r
}

pub fn fuzz(doc: &Document, args: &FuzzArgs, timing: bool, json: bool) -> Result<Vec<Record>, CliError> {
    let cfg = GeneratorConfig {
        n: doc.dim()?,
        max_degree: args.degree,
        density: args.density,
        seed: args.seed,
        count: args.count,
    };
    let options = FuzzOptions {
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        record_timing: timing,
    };
    let summary = fuzz_theorems_with(&cfg, &options).map_err(harness_error)?;
    if json {
        return Ok(summary.outcomes.iter().map(|o| outcome_record(&cfg, o)).collect());
    }
    let mut r = Record::new("fuzz", serde_json::to_value(&cfg).expect("config serializes"));
    for line in summary.human().lines() {
        r.line(line);
    }
    r.required("all_passed", summary.all_passed());
    Ok(vec![r])
}
