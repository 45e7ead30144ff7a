use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bohemian"));
    c.env_remove("BOHEMIAN_BUDGET");
    c
}

fn matrix_file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{name}.txt"));
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_reports() {
    let gws = matrix_file("gws", "1 -1 0 0\n-1 1 0 0\n0 0 1 -1\n");
    let o = run(&["classify", gws.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["is_generalized_well_settled"], true);
    assert_eq!(v["is_well_settled"], false);

    let ones = matrix_file("ones23", "1 1 1\n1 1 1\n");
    let v: Value = serde_json::from_str(&stdout(&run(&["classify", ones.to_str().unwrap()]))).unwrap();
    assert_eq!(v["rank"], 1);
    assert_eq!(v["full_form"]["kind"], "TypeI");

    let c2 = matrix_file("class2", "1 1 1\n1 -1 -1\n1 -1 -1\n");
    let v: Value = serde_json::from_str(&stdout(&run(&["classify", c2.to_str().unwrap()]))).unwrap();
    assert_eq!(v["is_class_II"], true);
    assert_eq!(v["is_class_III"], false);
}

#[test]
fn parse_errors_exit_2() {
    let bad = matrix_file("bad", "1 0\n0 2\n");
    let o = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column 3"), "{err}");
    let ragged = matrix_file("ragged", "1 0\n0\n");
    assert_eq!(run(&["classify", ragged.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["classify"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn oracle_stream_and_count() {
    let a = matrix_file("row", "1 -1\n");
    let o = run(&["inverses", a.to_str().unwrap(), "--spec", "1", "--mode", "oracle"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n-1\n\n1\n0\n\ncount: 2\n");

    let ones = matrix_file("ones22", "1 1\n1 1\n");
    let o = run(&["inverses", ones.to_str().unwrap(), "--spec", "2", "--count-only"]);
    assert_eq!(stdout(&o), "count: 5\n");
    let o = run(&["inverses", ones.to_str().unwrap(), "--spec", "2", "--count-only", "--rank", "1"]);
    assert_eq!(stdout(&o), "count: 4\n");
    let o = run(&["inverses", ones.to_str().unwrap(), "--spec", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().last().unwrap()["count"], 5);
}

#[test]
fn output_is_deterministic() {
    let a = matrix_file("det", "1 0 1\n0 1 -1\n");
    let args = ["inverses", a.to_str().unwrap(), "--spec", "2"];
    let first = stdout(&run(&args));
    let threaded = stdout(&bin().args(args).args(["--threads", "3"]).output().unwrap());
    assert_eq!(first, threaded);
    assert_eq!(first, stdout(&run(&args)));
}

#[test]
fn natural_population() {
    let ones = matrix_file("ones23n", "1 1 1\n1 1 1\n");
    let o = run(&["inverses", ones.to_str().unwrap(), "--spec", "2", "--count-only", "--population", "0,1"]);
    assert_eq!(stdout(&o), "count: 7\n");
    let o = run(&["inverses", ones.to_str().unwrap(), "--spec", "2", "--population", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_guard_exit_4() {
    let a = matrix_file("big", "1 1 1\n1 1 1\n1 1 1\n");
    let o = run(&["inverses", a.to_str().unwrap(), "--spec", "1", "--budget", "8"]);
    assert_eq!(o.status.code(), Some(4));
    let o = bin()
        .args(["inverses", a.to_str().unwrap(), "--spec", "1", "--count-only"])
        .env("BOHEMIAN_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["inverses", a.to_str().unwrap(), "--spec", "1", "--count-only"]);
    assert_eq!(stdout(&o), "count: 2907\n");
}

#[test]
fn theorem_mode() {
    let star = matrix_file("star", "1 -1 0 0 0\n1 0 -1 0 0\n1 0 0 0 -1\n1 0 0 -1 0\n");
    let o = run(&["inverses", star.to_str().unwrap(), "--spec", "12", "--mode", "theorem"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# theorem_id: Thm5.16\n"));
    assert!(out.ends_with("count: 16\n"));
    let members = bohemian::matrix::parse_matrix_stream(&out);
    // entries can leave the ternary range only if the family is wrong
    assert_eq!(members.unwrap().len(), 16);

    let last = matrix_file("last", "1 1 0\n1 0 0\n");
    let o = run(&["inverses", last.to_str().unwrap(), "--spec", "1", "--mode", "theorem", "--count-only"]);
    assert_eq!(stdout(&o), "# theorem_id: Thm5.16\ncount: 9\n");

    let o = run(&["inverses", last.to_str().unwrap(), "--spec", "1", "--mode", "theorem", "--describe"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "sum_constraints");

    let unsupported = matrix_file("unsup", "1 1 0\n0 1 1\n1 0 -1\n");
    let o = run(&["inverses", unsupported.to_str().unwrap(), "--spec", "1", "--mode", "theorem"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn count_and_identity() {
    let o = run(&["count", "--formula", "outer_type_I", "--m", "2", "--n", "2"]);
    assert_eq!(stdout(&o), "formula_id,m,n,value,method\nouter_type_I,2,2,4,closed_form\n");
    let o = run(&["count", "--formula", "natural_pop", "--m", "2", "--n", "3", "--zero-in-pop", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 7);
    let o = run(&["count", "--formula", "sum_t", "--n", "3", "--t", "-1"]);
    assert!(stdout(&o).ends_with(",6,closed_form\n"));
    assert_eq!(run(&["count", "--formula", "nope", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--formula", "outer_type_I", "--m", "2"]).status.code(), Some(2));
    assert!(run(&["count", "--list"]).status.success());
    let o = run(&["identity", "--m", "1", "--n1", "1", "--n2", "1"]);
    assert_eq!(stdout(&o), "2 2 equal\n");
}

#[test]
fn verify_known_gap_handling() {
    let strict = run(&["verify", "--suite", "outer", "--budget", "4"]);
    assert_ne!(strict.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&strict)).unwrap();
    let gaps = v["discrepancies"].as_array().unwrap();
    assert!(gaps.iter().any(|d| d["theorem_id"] == "Thm5.19"));
    let relaxed = run(&["verify", "--suite", "outer", "--budget", "4", "--allow-known-gaps"]);
    assert_eq!(relaxed.status.code(), Some(0));
    let core = run(&["verify", "--suite", "core", "--budget", "4"]);
    assert_eq!(core.status.code(), Some(0));
}
