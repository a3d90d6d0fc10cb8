use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sievegap"));
    c.env_remove("SIEVEGAP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../schema/report.schema.json");
    let v: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

const INVOCATIONS: &[&[&str]] = &[
    &["system-info", "--system", "poly:n^2+1", "--x", "10000"],
    &["system-info", "--system", "twin", "--x", "10000"],
    &["gaps", "--system", "eratosthenes", "--x", "13", "--window", "-100..5000"],
    &["construct", "--system", "eratosthenes", "--x", "150", "--preset", "desk", "--trials", "2"],
    &["construct", "--system", "eratosthenes", "--x", "120", "--mode", "cover", "--preset", "desk"],
    &["construct", "--system", "eratosthenes", "--x", "120"],
    &["cover-demo", "--vertices", "2000", "--block", "200", "--trials", "3"],
    &["moments", "--identity", "i", "--z", "30", "--y", "500", "--trials", "200"],
    &["moments", "--identity", "i-exact", "--z", "7", "--y", "50"],
    &["moments", "--identity", "ii-j1", "--y", "2000", "--trials", "30"],
    &["constants", "--rho", "0.5", "--degree", "4"],
    &["composite-runs", "--poly", "n^2+1", "--X", "100000", "--constructed", "--trials", "2"],
    &["coprime", "--poly", "n", "--k", "17", "--bound", "3000"],
    &["coprime", "--poly", "n^2+1", "--gap-x", "15"],
];

#[test]
fn every_report_validates_against_the_schema() {
    for args in INVOCATIONS {
        let v = json_of(&run(args));
        assert_eq!(v["command"], args[0]);
        assert_valid(&v);
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    for args in INVOCATIONS {
        let a = run(args);
        let mut with_one: Vec<&str> = vec!["--threads", "1"];
        with_one.extend_from_slice(args);
        let b = run(&with_one);
        let mut with_four: Vec<&str> = args.to_vec();
        with_four.extend_from_slice(&["--threads", "4"]);
        let c = run(&with_four);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stdout, c.stdout, "{args:?}");
    }
}

#[test]
fn documented_examples() {
    let v = json_of(&run(&["constants", "--rho", "1"]));
    assert!(v["result"]["c_rho"].as_f64().unwrap() > 0.0078125);
    let v = json_of(&run(&["gaps", "--system", "eratosthenes", "--x", "5", "--window", "1..31"]));
    assert_eq!(v["result"]["gap"], 6);
    let v = json_of(&run(&["system-info", "--system", "twin", "--x", "100000"]));
    assert!(!v["result"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["gaps", "--x", "5", "--window", "1..31"]).status.code(), Some(2));
    assert_eq!(run(&["gaps", "--system", "eratosthenes", "--x", "5", "--window", "1-31"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--rho", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--rho", "0"]).status.code(), Some(1));
    assert_eq!(run(&["gaps", "--system", "/no/such/file.json", "--x", "5", "--window", "1..3"]).status.code(), Some(1));
    assert_eq!(run(&["moments", "--identity", "i-exact", "--z", "30", "--y", "5"]).status.code(), Some(1));
    let degenerate = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(degenerate.path(), r#"{"kind":"table","entries":[[2,[0,1]]]}"#).unwrap();
    let out = run(&["gaps", "--system", degenerate.path().to_str().unwrap(), "--x", "2", "--window", "1..10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn seed_precedence() {
    let seed_of = |out: Output| json_of(&out)["config"]["seed"].as_u64().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 11, "rho": 0.25}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let default = seed_of(run(&["constants", "--rho", "1"]));
    assert_eq!(default, sievegap::rng::DEFAULT_SEED);
    let env = bin().env("SIEVEGAP_SEED", "7").args(["constants", "--rho", "1"]).output().unwrap();
    assert_eq!(seed_of(env), 7);
    let config = bin().env("SIEVEGAP_SEED", "7").args(["--config", cfg, "constants"]).output().unwrap();
    let v = json_of(&config);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["config"]["args"]["rho"], 0.25);
    let flag = run(&["--config", cfg, "constants", "--seed", "3", "--rho", "0.5"]);
    let v = json_of(&flag);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["args"]["rho"], 0.5);
}

#[test]
fn shift_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("b.txt");
    let shift_s = shift.to_str().unwrap();
    let v = json_of(&run(&[
        "construct", "--system", "eratosthenes", "--x", "100", "--preset", "desk", "--seed", "5",
        "--shift-out", shift_s,
    ]));
    let l = v["result"]["L"].as_i64().unwrap();
    let members = |window: String| {
        let g = json_of(&run(&[
            "gaps", "--system", "eratosthenes", "--x", "100", "--window", &window, "--shift-file", shift_s,
        ]));
        g["result"]["members_count"].as_u64().unwrap()
    };
    assert_eq!(members(format!("1..{l}")), 0);
    assert_eq!(members(format!("{}..{}", l + 1, l + 1)), 1);
}

#[test]
fn csv_has_dotted_columns() {
    let out = run(&["--format", "csv", "gaps", "--system", "eratosthenes", "--x", "5", "--window", "1..31"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gap = header.iter().position(|h| *h == "result.gap").unwrap();
    assert_eq!(row[gap], "6");
    assert!(header.contains(&"config.args.window"));
}
