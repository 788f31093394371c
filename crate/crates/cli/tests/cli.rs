use std::process::{Command, Output};

use serde_json::Value;

fn germtools(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_germtools")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_one_line_error(o: &Output, code: i32, class: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: {class}: ")), "{err}");
}

#[test]
fn preimage_of_coordinate_cross() {
    let o = germtools(&["preimage", "--dim", "2", "--map", "x1^2, x2", "--hypersurface", "y1*y2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "preimage: x1*x2\nverdict: SINGULAR\nstripped factor: x1\n");
}

#[test]
fn pullback_of_coordinate_differential() {
    let o = germtools(&["pullback-foliation", "--dim", "2", "--map", "x1^2-x2^2, x2", "--form", "dy1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("pullback: 2*x1 dx1 - 2*x2 dx2\n"), "{out}");
    assert!(out.contains("foliation: x1 dx1 - x2 dx2\n"), "{out}");
    assert!(out.contains("SINGULAR AT ORIGIN\n"), "{out}");
    assert!(!out.contains("NONSINGULAR"), "{out}");
}

#[test]
fn json_record_fields() {
    let o = germtools(&["preimage", "--dim", "2", "--map", "x1^2, x2", "--hypersurface", "y1*y2", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["command"], "preimage");
    assert_eq!(v["inputs"]["map"], "x1^2, x2");
    assert_eq!(v["results"]["preimage"], "x1*x2");
    assert_eq!(v["factors"], serde_json::json!(["x1"]));
    assert_eq!(v["timing"], Value::Null);
    assert!(v["verdicts"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn unknown_variable_is_a_validation_error() {
    let o = germtools(&["preimage", "--dim", "2", "--map", "x1 + z9, x2", "--hypersurface", "y1"]);
    assert_one_line_error(&o, 1, "validation");
    assert!(stderr(&o).contains("z9"));
}

#[test]
fn infinite_map_is_rejected() {
    let o = germtools(&["preimage", "--dim", "2", "--map", "x1*x2, x2", "--hypersurface", "y1*y2"]);
    assert_one_line_error(&o, 1, "validation");
    let o = germtools(&["finite-check", "--dim", "2", "--map", "x1*x2, x2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("finite: false\n"));
}

#[test]
fn argument_errors_exit_one() {
    assert_one_line_error(&germtools(&["bogus"]), 1, "validation");
    assert_one_line_error(&germtools(&["preimage", "--dim", "2"]), 1, "validation");
    assert_one_line_error(&germtools(&["preimage", "--dim", "two", "--map", "x1", "--hypersurface", "y1"]), 1, "validation");
    assert_one_line_error(&germtools(&["fuzz", "--dim", "1"]), 1, "validation");
    assert_one_line_error(&germtools(&["koszul-lift", "--dim", "2", "--map", "x1,x2", "--coeffs", "y1,y2", "--order", "x"]), 1, "validation");
}

#[test]
fn input_file_with_override() {
    let dir = std::env::temp_dir().join(format!("germtools-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.txt");
    std::fs::write(&path, "# cusp under a fold\ndim = 2\nmap = x1^2, x2\nhypersurface = y1*y2\n").unwrap();
    let p = path.to_str().unwrap();
    let o = germtools(&["preimage", "--input", p]);
    assert!(stdout(&o).starts_with("preimage: x1*x2\n"));
    let o = germtools(&["preimage", "--input", p, "--hypersurface", "y1^2 - y2^3"]);
    assert!(stdout(&o).starts_with("preimage: x1^4 - x2^3\n"), "{}", stdout(&o));
    std::fs::write(&path, "dim = 2\nshape = round\n").unwrap();
    assert_one_line_error(&germtools(&["preimage", "--input", p]), 1, "validation");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn trace_and_tangency() {
    let o = germtools(&["trace", "--dim", "2", "--map", "x1^2 - x2*x1, x2", "--poly", "x1"]);
    assert!(stdout(&o).starts_with("pushforward: y2\n"), "{}", stdout(&o));
    let o = germtools(&["trace", "--dim", "2", "--map", "x1^2, x2", "--poly", "x1^2"]);
    assert!(stdout(&o).starts_with("pushforward: 2*y1\n"));
    let o = germtools(&["tangency", "--dim", "2", "--hypersurface", "y1*y2", "--form", "y2 dy1 + y1 dy2"]);
    assert_eq!(stdout(&o), "tangent: true\n");
    let o = germtools(&["tangency", "--dim", "2", "--hypersurface", "y1", "--form", "dy2"]);
    assert_eq!(stdout(&o), "tangent: false\n");
}

#[test]
fn koszul_desk_examples() {
    let o = germtools(&[
        "koszul-lift", "--dim", "2", "--map", "x1, x2", "--coeffs", "y1^2, y2^2",
        "--tau", "(x1 + x2)*x1^2 dx1 + (x1 + x2)*x2^2 dx2", "--json",
    ]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["results"]["alpha"], "x1 + x2");
    assert_eq!(v["results"]["residual"], "0");
    let o = germtools(&[
        "koszul-lift", "--dim", "3", "--map", "x1, x2, x3", "--coeffs", "y1, y2, y3",
        "--tau", "x1 dx1^dx3 + x2 dx2^dx3", "--bound", "2", "--json",
    ]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["results"]["alpha"], "-dx3");
    let o = germtools(&["koszul-lift", "--dim", "2", "--map", "x1 + x2^2, x2^3 + x1*x2", "--coeffs", "y1, y2", "--order", "1,2", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["results"]["lhs_order"], 1);
}

#[test]
fn slice_samples_three_offsets() {
    let o = germtools(&["slice", "--dim", "3", "--map", "x1, x2, x3", "--hypersurface", "y1^2 - y2^2*y3", "--normal", "0,0,1", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let records: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3);
    let offsets: Vec<&str> = records.iter().map(|r| r["inputs"]["offset"].as_str().unwrap()).collect();
    assert_eq!(offsets, ["1", "2", "-1"]);
    let o = germtools(&["slice", "--dim", "3", "--map", "x1, x2, x3", "--hypersurface", "y1^2 - y2^2*y3", "--normal", "0,0,1", "--offset", "-1/2"]);
    assert!(stdout(&o).contains("slice singular: true"), "{}", stdout(&o));
}

#[test]
fn fuzz_fifty_records_all_pass_and_stable() {
    let args = ["fuzz", "--dim", "2", "--count", "50", "--seed", "7", "--json"];
    let first = germtools(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let out = stdout(&first);
    let records: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 50);
    for r in &records {
        assert_eq!(r["command"], "fuzz");
        assert!(r["verdicts"].as_array().unwrap().iter().all(|c| c["holds"] == true || c["required"] == false));
    }
    assert_eq!(out, stdout(&germtools(&args)));
    let seq = germtools(&["fuzz", "--dim", "2", "--count", "50", "--seed", "7", "--json", "--sequential"]);
    assert_eq!(out, stdout(&seq));
}

#[test]
fn max_degree_cap_surfaces_as_validation_error() {
    let o = germtools(&["preimage", "--dim", "2", "--map", "x1^5, x2^5", "--hypersurface", "y1^3 - y2^2", "--max-degree", "8"]);
    assert_one_line_error(&o, 1, "validation");
}

#[test]
fn help_exits_zero() {
    let o = germtools(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("pullback-foliation"));
}
