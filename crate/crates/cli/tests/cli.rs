use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn tk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tk"))
        .args(args)
        .output()
        .expect("tk runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_sentence() {
    let o = tk(&[
        "eval",
        "--stage",
        "4",
        "--formula",
        "(ex x (all y (not (mem y x))))",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn eval_with_assignment() {
    let o = tk(&[
        "eval",
        "--stage",
        "3",
        "--formula",
        "(mem x y)",
        "--assign",
        "x=0",
        "--assign",
        "y=1",
    ]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = tk(&[
        "eval",
        "--stage",
        "3",
        "--formula",
        "(mem x y)",
        "--assign",
        "x=0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["eval", "--formula", "(eq x x)"][..],
        &["eval", "--stage", "9", "--formula", "(eq #0 #0)"],
        &["eval", "--stage", "2", "--formula", "(eq #0"],
        &["validate-class", "--stage", "2", "--class", "/nonexistent"],
        &["gen-scheme", "--scheme", "Sep", "--formula", "(mem z q)"],
    ] {
        let o = tk(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bad_class_reports_atomic_witness() {
    let (structure, class) = (fixture("v3.struct"), fixture("bad.class"));
    let o = tk(&[
        "validate-class",
        "--structure",
        structure.to_str().unwrap(),
        "--class",
        class.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("1 violation(s)"), "{out}");
    assert!(out.contains("[2] (mem x y) {x=1, y=0}"), "{out}");
}

#[test]
fn reflection_scan() {
    let o = tk(&[
        "reflect",
        "--N",
        "4",
        "--formula",
        "(ex x (mem z x))",
        "--scan",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2], "3\tfalse");
    assert_eq!(rows[3], "4\ttrue");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2)
        .map(|i| dir.path().join(format!("r{i}.jsonl")))
        .collect();
    for p in &paths {
        let o = tk(&[
            "check-property",
            "--stage",
            "2",
            "--property",
            "dc_out",
            "--count",
            "300",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (
        std::fs::read(&paths[0]).unwrap(),
        std::fs::read(&paths[1]).unwrap(),
    );
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let header: serde_json::Value =
        serde_json::from_str(std::str::from_utf8(&a).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(header["checked"], 300);
}

#[test]
fn schemes_and_reflection_instances() {
    let o = tk(&[
        "gen-scheme",
        "--scheme",
        "Sep",
        "--formula",
        "(mem x v)",
        "--stage",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(1), Some("true"));
    let o = tk(&["gen-ref", "--formula", "(mem x #1)", "--kind", "con"]);
    assert!(stdout(&o).contains("(prov Prov* (not (mem x #1)))"));
    assert!(stdout(&o).trim_end().ends_with("@ref base=ZF n=1 iter=1"));
    let theory = fixture("reflect.theory");
    let o = tk(&[
        "check-ref",
        "--stage",
        "2",
        "--theory",
        theory.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn internal_separation_and_gref() {
    let o = tk(&[
        "check-internal",
        "--stage",
        "3",
        "--scheme",
        "IntSep",
        "--depth",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = tk(&["check-gref", "--stage", "2", "--mode", "prop"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn fuzz_detects_every_toggle() {
    let o = tk(&["fuzz", "--stage", "2", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("op\tshape\tmutants\tdetected"));
    assert!(out.contains("0 violation(s)"));
}

#[test]
fn collapse_and_diagonal() {
    let graph = fixture("pair.graph");
    let o = tk(&["collapse", "--graph", graph.to_str().unwrap()]);
    assert_eq!(stdout(&o), "e\t#0\t0\none\t#1\t1\ntwo\t#3\t3\n");
    let o = tk(&["diagonal", "--stage", "3", "--formula", "(eq x y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("S(r, r) = true, R(r) = false"));
}
