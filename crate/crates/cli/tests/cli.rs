use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_growthbound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("growthbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn wilkinson_bound_matches_closed_form() {
    let v: Value = serde_json::from_str(&ok(&["bound", "--n", "100", "--program", "wilkinson", "--format", "json"])).unwrap();
    let obj = v["float_objective"].as_f64().unwrap();
    let closed = v["wilkinson_closed_form"].as_f64().unwrap();
    assert!((obj - closed).abs() < 1e-7);
    assert!(v.get("timings").is_none());
}

#[test]
fn improved_bound_report() {
    let cert = tmp("improved-200.json");
    let text = ok(&[
        "bound",
        "--n",
        "200",
        "--certify",
        "--format",
        "json",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verified"], Value::Bool(true));
    let bound = v["certified_bound_f64"].as_f64().unwrap();
    assert!(bound >= v["float_objective"].as_f64().unwrap() - 1e-9);
    assert!(bound < v["wilkinson_closed_form"].as_f64().unwrap());
    assert!(bound <= v["theorem1_value"].as_f64().unwrap());

    let check = ok(&["certify", "--check", cert.to_str().unwrap()]);
    assert!(check.starts_with("[PASS]"), "{check}");

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    doc["bound"] = Value::String("1/7".into());
    let bad = tmp("corrupted.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    assert_eq!(run(&["certify", "--check", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn trivial_dimension() {
    let v: Value = serde_json::from_str(&ok(&["bound", "--n", "1", "--format", "json"])).unwrap();
    assert_eq!(v["float_objective"].as_f64(), Some(0.0));
}

#[test]
fn growth_figure_smallest_sweep() {
    let csv = ok(&["figure", "growth-bounds", "--nmax", "2"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "{csv}");
    assert!(lines[1].starts_with("1,") && lines[2].starts_with("2,"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["figure", "growth-bounds", "--nmax", "60", "--points", "8", "--certify"][..],
        &["figure", "active-constraints", "--n", "40", "--format", "json"][..],
        &["demo", "appendix-a", "--n", "30", "--format", "json", "--seed", "7"][..],
        &["constants", "--json"][..],
    ] {
        assert_eq!(ok(args), ok(args), "{args:?}");
    }
    let a = ok(&["demo", "appendix-a", "--n", "30", "--format", "json", "--seed", "1"]);
    let b = ok(&["demo", "appendix-a", "--n", "30", "--format", "json", "--seed", "2"]);
    assert_ne!(a, b);
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = ["figure", "growth-bounds", "--nmax", "80", "--points", "6"];
    let one = bin().args(args).env("GROWTHBOUND_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("GROWTHBOUND_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bound"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--n", "10", "--selector", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["figure", "growth-bounds", "--nmax", "1"]).status.code(), Some(2));
    assert_eq!(run(&["ge", "run", "--matrix-file", "/nonexistent/m.txt"]).status.code(), Some(2));
    assert_eq!(run(&["certify"]).status.code(), Some(2));

    let singular = tmp("singular.txt");
    std::fs::write(&singular, "2 2 rational-real\n1 2\n2 4\n").unwrap();
    assert_eq!(
        run(&["ge", "run", "--matrix-file", singular.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn ge_run_on_wilkinson_file() {
    let path = tmp("w4.txt");
    std::fs::write(&path, "# 4 x 4\n4 4 rational-real\n1 0 0 1\n-1 1 0 1\n-1 -1 1 1\n-1 -1 -1 1\n").unwrap();
    let v: Value = serde_json::from_str(&ok(&[
        "ge",
        "run",
        "--matrix-file",
        path.to_str().unwrap(),
        "--pivoting",
        "partial",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(v["growth_factor_exact"], Value::String("8".into()));
    assert_eq!(v["mode"], Value::String("rational-real".into()));

    let c = tmp("c.txt");
    std::fs::write(&c, "2 2 binary64-complex\n1,1 0,2\n3,0 1,-1\n").unwrap();
    let v: Value = serde_json::from_str(&ok(&["ge", "run", "--matrix-file", c.to_str().unwrap(), "--format", "json"])).unwrap();
    // |det| = |(1+i)(1-i) - 6i| = |2 - 6i|
    let ln_det = v["ln_abs_det"].as_f64().unwrap();
    assert!((ln_det - 40f64.sqrt().ln()).abs() < 1e-12);
}

#[test]
fn demo_small_and_standard() {
    let v: Value = serde_json::from_str(&ok(&["demo", "appendix-a", "--n", "5", "--format", "json"])).unwrap();
    assert!(v["relative_error_partial"].as_f64().unwrap() < 1e-12);
    assert!(v["relative_error_complete"].as_f64().unwrap() < 1e-12);

    let v: Value = serde_json::from_str(&ok(&["demo", "appendix-a", "--format", "json"])).unwrap();
    assert!(v["relative_error_partial"].as_f64().unwrap() > 1e-2);
    assert!(v["relative_error_complete"].as_f64().unwrap() < 1e-10);
    let c = v["condition_estimate"].as_f64().unwrap();
    assert!((40.0..=50.0).contains(&c));
    assert_eq!(v["growth_partial"].as_f64(), Some(2f64.powi(99)));
}

#[test]
fn active_constraints_exact_small() {
    let csv = ok(&["figure", "active-constraints", "--n", "3", "--selector", "full", "--exact"]);
    let active: Vec<&str> = csv.lines().filter(|l| l.starts_with("active,")).collect();
    assert!(!active.is_empty());
    let svg = ok(&["figure", "active-constraints", "--n", "30", "--format", "svg"]);
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn constants_and_selftest_pass() {
    let text = ok(&["constants"]);
    assert!(!text.contains("[FAIL]"));
    let v: Value = serde_json::from_str(&ok(&["constants", "--json"])).unwrap();
    let alpha = v["constants"]["alpha"].as_f64().unwrap();
    assert!((alpha - 0.20781).abs() < 1e-5);
    let st = ok(&["selftest"]);
    assert!(st.contains("[PASS]") && !st.contains("[FAIL]"));
}

#[test]
fn geomean_program() {
    let v: Value = serde_json::from_str(&ok(&["bound", "--n", "10", "--program", "geomean", "--certify", "--format", "json", "--certificate", tmp("g.json").to_str().unwrap()])).unwrap();
    let oracle: f64 = 0.5 * (2..=10).map(|k| (k as f64).ln() / (k - 1) as f64).sum::<f64>();
    assert!((v["certified_bound_f64"].as_f64().unwrap() - oracle).abs() < 1e-12);
}
