use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn khcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khcube")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = khcube(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("JSON on stdout"))
}

#[test]
fn unknot_table() {
    let o = khcube(&["kh", "homology", "unknot_0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "i=0   j=-1  Z\ni=0   j=1   Z\n");
}

#[test]
fn trefoil_json_matches_golden() {
    let (code, v) = json(&["kh", "homology", "trefoil_right"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(corpus().join("golden/kh/trefoil_right.json")).unwrap()).unwrap();
    assert_eq!(v["rows"], golden["rows"]);
}

#[test]
fn json_is_deterministic() {
    let a = khcube(&["kh", "homology", "figure_eight", "--json"]);
    let b = khcube(&["--jobs", "1", "kh", "homology", "figure_eight", "--json"]);
    let c = khcube(&["--jobs", "3", "kh", "homology", "figure_eight", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn reduced_needs_a_basepoint() {
    let o = khcube(&["kh", "homology", "trefoil_right", "--reduced", "--basepoint", "1"]);
    assert_eq!(stdout(&o), "i=0   j=2   Z\ni=2   j=6   Z\ni=3   j=8   Z\n");
    assert_eq!(khcube(&["kh", "homology", "trefoil_right", "--reduced"]).status.code(), Some(2));
    assert_eq!(khcube(&["kh", "homology", "trefoil_right", "--basepoint", "1"]).status.code(), Some(2));
    assert_eq!(khcube(&["kh", "homology", "trefoil_right", "--reduced", "--basepoint", "99"]).status.code(), Some(2));
}

#[test]
fn verify_reports_every_condition() {
    let (code, v) = json(&["kh", "verify", "figure_eight"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["condition"].as_str().unwrap()).collect();
    assert_eq!(names, ["C-0", "C-1", "C-2", "d^2=0", "quantum grading"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn multiple_extend_search() {
    let o = khcube(&["functor", "search-matchings", "multiple_extend"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "24 coherent matchings (6 modulo the a₁b₁↦c₁d₁ normalization)\n");
    let (_, v) = json(&["functor", "search-matchings", "multiple_extend"]);
    assert_eq!(v["solutions"], 24);
    assert_eq!(v["normalized"], 6);
    assert_eq!(v["matchings"].as_array().unwrap().len(), 24);
}

#[test]
fn search_cap() {
    let o = khcube(&["functor", "search-matchings", "multiple_extend", "--max-search", "5"]);
    assert!(stdout(&o).starts_with("at least 5 coherent matchings"), "{}", stdout(&o));
    let o = khcube(&["functor", "search-matchings", "multiple_extend", "--max-search", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_extend_fails_verification() {
    let o = khcube(&["functor", "check", "zero_extend", "--search"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("no coherent matching exists\n"));
    let o = khcube(&["functor", "check", "zero_extend"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL C-1"));
}

#[test]
fn complete_functor_checks() {
    let o = khcube(&["functor", "check", "p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn certificate_passes() {
    let (code, v) = json(&["functor", "certificate", "rp2_wedge"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert!(v["report"]["steps"].as_array().unwrap().iter().all(|s| s["passed"] == true));
}

#[test]
fn delta_agreement() {
    let o = khcube(&["delta", "homology", "torus_7"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.ends_with("agree\n"));
    assert_eq!(out.matches("H_1 = Z^2").count(), 2, "{out}");
}

#[test]
fn examples_all_pass() {
    let (code, v) = json(&["examples", "run"]);
    assert_eq!(code, 0);
    assert_eq!(v["examples"].as_array().unwrap().len(), 8);
    assert_eq!(v["passed"], true);
}

#[test]
fn input_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("khcube-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.pd");
    std::fs::write(&bad, "PD[X(1,2,3)]").unwrap();
    assert_eq!(khcube(&["kh", "homology", bad.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"n\": 1").unwrap();
    assert_eq!(khcube(&["functor", "check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(khcube(&["kh", "homology", "no_such_diagram"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn corpus_dir_override() {
    let dir = std::env::temp_dir().join(format!("khcube-corpus-{}", std::process::id()));
    std::fs::create_dir_all(dir.join("pd")).unwrap();
    std::fs::write(dir.join("pd/mine.pd"), "PD[X(1,1,2,2)]").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_khcube"))
        .args(["kh", "homology", "mine"])
        .env("KH_CORPUS_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "i=0   j=-1  Z\ni=0   j=1   Z\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
