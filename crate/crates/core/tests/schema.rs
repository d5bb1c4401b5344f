#![cfg(feature = "cli")]

use qhcenter::cli::run::main_with;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn check(args: &[&str], code: i32) -> Value {
    let o = main_with(std::iter::once("qhcenter").chain(args.iter().copied()));
    assert_eq!(o.code, code, "{args:?}\n{}", o.stdout);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    let errs: Vec<String> = validator().iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errs.is_empty(), "{args:?}: {errs:#?}");
    v
}

#[test]
fn classify_output_validates() {
    check(&["classify", "--json", "-f", "P = y; Q = -x^3"], 0);
    check(&["classify", "--json", "-f", "P = x; Q = y"], 0);
    check(&["classify", "--json", "--timings", "-f", "P = -y^3 + x*y^2; Q = x^3 + y^3"], 0);
}

#[test]
fn full_reports_validate() {
    check(&["all", "--json", "-f", "P = x^3 - y^3; Q = x^3 + x*y^2"], 0);
    check(&["all", "--json", "--oracle", "-f", "P = -y^3 + x*y^2; Q = x^3 + y^3"], 0);
    check(&["reverse", "--json", "-f", "P = y; Q = -x^3 + x*y"], 0);
    check(&["integrate", "--json", "-f", "P = y + x^2; Q = -x^3 - 2*x*y"], 0);
}

#[test]
fn family_reports_validate() {
    check(&["family", "S19", "--json", "--sample", "on_center", "--count", "5", "--seed", "1", "--mode", "all"], 0);
    check(&["family", "S29", "--json", "--sample", "on_reversible", "--count", "3", "--mode", "all"], 0);
    check(&["family", "S14", "--json", "--params", "1,1"], 0);
}

#[test]
fn error_reports_validate() {
    let v = check(&["classify", "--json", "-f", "P = x^(1/2); Q = y"], 2);
    assert_eq!(v["error"]["exit_code"], 2);
    check(&["classify", "--json", "-f", "P = x*y; Q = x^2"], 4);
    check(&["family", "S99", "--json"], 2);
}

#[test]
fn schema_rejects_tampering() {
    let o = main_with(["qhcenter", "classify", "--json", "-f", "P = y; Q = -x^3"]);
    let mut v: Value = serde_json::from_str(&o.stdout).unwrap();
    v["analyses"][0]["verdict"]["label"] = "Saddle".into();
    assert!(!validator().is_valid(&v));
    let mut w: Value = serde_json::from_str(&o.stdout).unwrap();
    w["schema_version"] = 2.into();
    assert!(!validator().is_valid(&w));
}
