use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const E1: &str = "FCT v1\n2 3\n5 3\n4 2 2\n10 10 10\n4 4 4\n0 0 0\n0 0 0\n";
const TINY: &str = "FCT v1\n2 2\n2 2\n3 1\n1 1\n1 1\n0 1\n1 0\n";

fn fct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fct")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_e1_with_greedy() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "e1.fct", E1);
    let sol = dir.path().join("e1.sol");
    let out = fct(&["solve", "--variant", "pfct-s", "--input", s(&input), "--out", s(&sol), "--oracle"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = &json_lines(&out)[0];
    assert_eq!(report["cost"], "28");
    assert_eq!(report["oracle_cost"], "28");
    assert_eq!(report["ratio"], "1");
    assert_eq!(report["wall_time_us"], Value::Null);
    assert_eq!(fs::read_to_string(&sol).unwrap(), "SOL v1\n1 1 4\n1 2 1\n2 2 1\n2 3 2\n");
}

#[test]
fn solve_fct_u_tiny() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "tiny.fct", TINY);
    let out = fct(&["solve", "--variant", "fct-u", "--input", s(&input)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(json_lines(&out)[0]["cost"], "4");
}

#[test]
fn variant_mismatch_is_a_user_error() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "e1.fct", E1);
    let out = fct(&["solve", "--variant", "pfct-u", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("requires PFCT-U"));
}

#[test]
fn malformed_input_names_the_line() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "bad.fct", "FCT v1\n1 1\n1\n1\ninf\n0\n");
    let out = fct(&["oracle", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "e1.fct", E1);
    let good = file(&dir, "good.sol", "SOL v1\n1 1 4\n1 2 1\n2 2 1\n2 3 2\n");
    let out = fct(&["verify", "--input", s(&input), "--solution", s(&good)]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["cost"], "28");

    let bad = file(&dir, "bad.sol", "SOL v1\n1 1 4\n1 2 1\n2 2 2\n2 3 1\n");
    let out = fct(&["verify", "--input", s(&input), "--solution", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let report = &json_lines(&out)[0];
    assert_eq!(report["status"], "violation");
    assert!(report["detail"].as_str().unwrap().contains("sink 2"));
}

#[test]
fn bicriteria_solution_verifies_within_band() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "skew.fct", "FCT v1\n2 2\n33 49\n65 17\n1 2\n3 1\n1/2 1\n2 0\n");
    let sol = dir.path().join("skew.sol");
    let out = fct(&["solve", "--variant", "fct-bicriteria", "--epsilon", "1/8", "--input", s(&input), "--out", s(&sol)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(fs::read_to_string(&sol).unwrap().starts_with("SOL v1\nrelaxed 1/8\n"));
    let out = fct(&["verify", "--input", s(&input), "--solution", s(&sol)]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn certificate_is_stable_and_perturbation_fails() {
    let a = fct(&["certify", "lp65"]);
    let b = fct(&["certify", "lp65"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("value 6/5\n"));
    let bad = fct(&["certify", "lp65", "--perturb-primal"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn ptas_rejects_non_unit_epsilon() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "e1.fct", E1);
    let out = fct(&["solve", "--variant", "pfct-ptas", "--epsilon", "2/3", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_seeded_and_parses() {
    let dir = TempDir::new().unwrap();
    for from in ["dst", "setcover", "3dm"] {
        let a = fct(&["generate", "--from", from, "--seed", "5"]);
        let b = fct(&["generate", "--from", from, "--seed", "5"]);
        assert!(a.status.success(), "{from}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
        let path = file(&dir, &format!("{from}.fct"), &stdout(&a));
        let out = fct(&["oracle", "--input", s(&path)]);
        assert!(out.status.success(), "{from}: {}", stderr(&out));
    }
    let out = fct(&["generate", "--family", "pfct-s", "--n", "2", "--m", "3", "--seed", "1"]);
    assert!(stdout(&out).starts_with("FCT v1\n2 3\n"));
}

#[test]
fn generate_from_file() {
    let dir = TempDir::new().unwrap();
    let sc = file(&dir, "sc.txt", "SETCOVER v1\n2 2\n1 2\n2\n");
    let out_path = dir.path().join("sc.fct");
    let out = fct(&["generate", "--from", "setcover", "--input", s(&sc), "--out", s(&out_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = fct(&["oracle", "--input", s(&out_path)]);
    assert_eq!(json_lines(&out)[0]["cost"], "1");
}

fn max_ratio(lines: &[Value], variant: &str) -> String {
    lines
        .iter()
        .find(|l| l["summary"]["variant"] == variant)
        .map(|l| l["summary"]["max_ratio"].as_str().unwrap().to_string())
        .unwrap()
}

fn ratio_at_most(text: &str, num: u64, den: u64) -> bool {
    let (p, q) = text.split_once('/').unwrap_or((text, "1"));
    p.parse::<u64>().unwrap() * den <= num * q.parse::<u64>().unwrap()
}

#[test]
fn bench_reports_ratios() {
    let dir = TempDir::new().unwrap();
    let config = file(
        &dir,
        "bench.toml",
        "[[run]]\nfamily = \"pfct-s\"\nsizes = [[2, 3], [4, 6]]\nseeds = 100\nvariants = [\"pfct-s\"]\n\n\
         [[run]]\nfamily = \"pfct-u\"\nsizes = [[4, 5]]\nseeds = 50\nvariants = [\"pfct-u\"]\n",
    );
    let csv = dir.path().join("bench.csv");
    let out = fct(&["bench", "--config", s(&config), "--out", s(&csv)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 252);
    assert!(ratio_at_most(&max_ratio(&lines, "pfct-s"), 2, 1));
    assert!(ratio_at_most(&max_ratio(&lines, "pfct-u"), 6, 5));
    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 251);
    assert!(table.lines().nth(1).unwrap().starts_with("pfct-s-2x3-0,pfct-s,greedy,"));

    let again = fct(&["bench", "--config", s(&config)]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn empty_bench_config() {
    let dir = TempDir::new().unwrap();
    let config = file(&dir, "empty.toml", "");
    let csv = dir.path().join("empty.csv");
    let out = fct(&["bench", "--config", s(&config), "--out", s(&csv)]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1);
}
