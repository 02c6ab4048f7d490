use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairprep"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn studies_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../studies")
}

const SCHEMA: &str = r#"[
  {"name": "id", "kind": "numeric", "role": "drop"},
  {"name": "x1", "kind": "numeric", "role": "feature"},
  {"name": "x2", "kind": "numeric", "role": "feature"},
  {"name": "city", "kind": "categorical", "role": "feature", "categories": ["north", "south", "east"]},
  {"name": "group", "kind": "binary", "role": "feature"},
  {"name": "label", "kind": "binary", "role": "target"}
]"#;

/// 200 rows where x2 leaks `group`.
fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let mut csv = String::from("id,x1,x2,city,group,label\n");
    for i in 0..200u32 {
        let g = (i * 7 + 3) % 5 < 2;
        let x1 = f64::from(i % 17) / 4.0 - 2.0;
        let x2 = if g { 1.5 } else { -0.5 } + f64::from(i % 11) / 10.0;
        let city = ["north", "south", "east"][(i % 3) as usize];
        let label = u8::from(x1 + f64::from(u8::from(g)) > 0.0);
        csv.push_str(&format!("{i},{x1},{x2},{city},{},{label}\n", u8::from(g)));
    }
    let data = dir.join("in.csv");
    let schema = dir.join("schema.json");
    fs::write(&data, csv).unwrap();
    fs::write(&schema, SCHEMA).unwrap();
    (data, schema)
}

fn debias(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let (data, schema) = fixture(dir);
    let out = dir.join(out);
    let mut args = vec![
        "debias",
        "--input",
        data.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--protected",
        "group",
        "--output",
        out.to_str().unwrap(),
        "--epochs",
        "15",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["debias", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["debias", "--no-such-flag"])), 1);
    assert_eq!(code(&run(&["synth-check", "--n", "many"])), 1);
    let d = TempDir::new().unwrap();
    let o = debias(d.path(), "out.csv", &["--protected", "nope"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn data_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let (data, schema) = fixture(d.path());
    let missing = d.path().join("missing.csv");
    let out = d.path().join("o.csv");
    let args = |input: &Path| {
        run(&[
            "debias",
            "--input",
            input.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--protected",
            "group",
            "--output",
            out.to_str().unwrap(),
        ])
    };
    assert_eq!(code(&args(&missing)), 2);
    let corrupt = d.path().join("corrupt.csv");
    fs::write(&corrupt, "id,x1\n1,2\n").unwrap();
    assert_eq!(code(&args(&corrupt)), 2);
    assert!(!out.exists());
    fs::write(&schema, "{not json").unwrap();
    assert_eq!(code(&args(&data)), 2);
}

#[test]
fn debias_keeps_shape_and_header() {
    let d = TempDir::new().unwrap();
    let report = d.path().join("report.json");
    let o = debias(d.path(), "out.csv", &["--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let input = fs::read_to_string(d.path().join("in.csv")).unwrap();
    let output = fs::read_to_string(d.path().join("out.csv")).unwrap();
    assert_eq!(output.lines().next(), input.lines().next());
    assert_eq!(output.lines().count(), input.lines().count());
    // drop and target columns pass through untouched
    for (a, b) in input.lines().zip(output.lines()).skip(1) {
        let a: Vec<&str> = a.split(',').collect();
        let b: Vec<&str> = b.split(',').collect();
        assert_eq!((a[0], a[4], a[5]), (b[0], b[4], b[5]));
    }
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["status"], "ok");
    assert_eq!(r["rows"], 200);
    assert_eq!(r["probe"][0]["column"], "group");
}

#[test]
fn debias_is_byte_identical_across_runs() {
    let d = TempDir::new().unwrap();
    let m1 = d.path().join("m1.json");
    let m2 = d.path().join("m2.json");
    assert_eq!(code(&debias(d.path(), "a.csv", &["--model-out", m1.to_str().unwrap(), "--seed", "4"])), 0);
    assert_eq!(code(&debias(d.path(), "b.csv", &["--model-out", m2.to_str().unwrap(), "--seed", "4"])), 0);
    assert_eq!(fs::read(d.path().join("a.csv")).unwrap(), fs::read(d.path().join("b.csv")).unwrap());
    assert_eq!(fs::read(m1).unwrap(), fs::read(m2).unwrap());
}

#[test]
fn huge_learning_rate_exits_three_with_report() {
    let d = TempDir::new().unwrap();
    let report = d.path().join("r.json");
    let o = debias(d.path(), "out.csv", &["--learning-rate", "1e200", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!d.path().join("out.csv").exists());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["status"], "diverged");
}

fn estimates(dir: &Path, rows: &[(&str, f64)]) -> PathBuf {
    let mut s = String::from("group,estimate\n");
    for (g, e) in rows {
        s.push_str(&format!("{g},{e}\n"));
    }
    let p = dir.join("est.csv");
    fs::write(&p, s).unwrap();
    p
}

fn audit_score(dir: &Path, rows: &[(&str, f64)]) -> serde_json::Value {
    let est = estimates(dir, rows);
    let report = dir.join("audit.json");
    let o = run(&[
        "audit",
        "--estimates",
        est.to_str().unwrap(),
        "--groups",
        "group",
        "--contrast",
        "A,B",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    r["bias_table"]["rows"][0]["bias_score"].clone()
}

#[test]
fn audit_scores() {
    let d = TempDir::new().unwrap();
    let same = audit_score(d.path(), &[("A", 0.2), ("A", 0.6), ("B", 0.6), ("B", 0.2)]);
    assert_eq!(same.as_f64().unwrap(), 0.0);
    // μ ± σ rows reproduce the requested moments
    let s = audit_score(d.path(), &[("A", 0.67), ("A", 0.83), ("B", 0.38), ("B", 0.50)]);
    assert!((s.as_f64().unwrap() - 0.31 / 0.07).abs() < 1e-9, "{s}");
    let inf = audit_score(d.path(), &[("A", 1.0), ("A", 1.0), ("B", 0.0), ("B", 0.0)]);
    assert_eq!(inf, "inf");
}

#[test]
fn audit_unknown_column_is_usage_error() {
    let d = TempDir::new().unwrap();
    let est = estimates(d.path(), &[("A", 0.1), ("B", 0.2)]);
    let o = run(&["audit", "--estimates", est.to_str().unwrap(), "--groups", "nope"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn synth_check_without_bias() {
    let o = run(&["synth-check", "--beta", "0", "--rho", "0", "--n", "600", "--epochs", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no bias detected"));
}

#[test]
fn run_study_writes_one_block_per_seed() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("heart");
    let config = studies_dir().join("heart.json");
    let o = run(&["run-study", "--config", config.to_str().unwrap(), "--seeds", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for s in 1..=2 {
        assert!(out.join(format!("seed-{s}/bias_table.csv")).is_file());
    }
    assert!(!out.join("seed-3").exists());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    assert_eq!(r["seeds"].as_array().unwrap().len(), 2);
}
