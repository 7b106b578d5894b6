use std::path::Path;
use std::process::{Command, Output};

fn forb_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_construct(p: &str, rows: &str, path: &Path) {
    let o = forb_cmd(&[
        "construct",
        "--p",
        p,
        "--rows",
        rows,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn forb_reports_value_and_status() {
    let o = forb_cmd(&["forb", "--rows", "4", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("forb(4, F(0,3,1,0)) = 10"), "{out}");
    assert!(out.contains("status: optimal"), "{out}");
}

#[test]
fn forb_budget_expiry_exits_2() {
    let o = forb_cmd(&["forb", "--rows", "12", "--p", "5", "--budget", "0.2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains(">="), "{out}");
    assert!(out.contains("status: budget-expired"), "{out}");
}

#[test]
fn forb_writes_witness_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.txt");
    let o = forb_cmd(&[
        "forb",
        "--rows",
        "4",
        "--p",
        "3",
        "--witness",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let m = forb::matrix::BinaryMatrix::parse(&text).unwrap();
    assert_eq!(m.columns(), 10);
    assert!(m.is_simple());
    assert!(forb::containment::avoids_two_row(&m, 3));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.txt");
    write_construct("9", "5", &k5);

    let o = forb_cmd(&["check", k5.to_str().unwrap(), "--p", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("avoids F(0,9,1,0)"));

    let o = forb_cmd(&["check", k5.to_str().unwrap(), "--p", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("contains F(0,8,1,0)"), "{out}");
    assert!(out.contains("witness rows:"), "{out}");
    assert!(out.contains("witness columns:"), "{out}");
}

#[test]
fn check_against_pattern_file() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.txt");
    write_construct("9", "5", &k5);
    // F(0,8,1,0) written out as a 2x9 grid.
    let pat = dir.path().join("pattern.txt");
    std::fs::write(&pat, "2 9\n111111110\n000000001\n").unwrap();
    let o = forb_cmd(&[
        "check",
        k5.to_str().unwrap(),
        "--forbidden",
        pat.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 3\n10\n011\n").unwrap();

    for args in [
        vec!["check", bad.to_str().unwrap(), "--p", "3"],
        vec!["check", "/definitely/not/there", "--p", "3"],
        vec!["forb", "--rows", "4"],
        vec!["forb", "--rows", "4", "--p", "3", "--unknown-flag"],
        vec!["forb", "--rows", "4", "--p", "0"],
        vec!["forb", "--rows", "99", "--p", "3"],
        vec!["construct", "--p", "6", "--rows", "7"],
        vec!["construct", "--p", "6", "--rows", "10", "--variant", "nope"],
        vec!["bound", "--p", "11", "--rows", "5"],
        vec!["oracle", "--k", "9", "--t", "4"],
    ] {
        let o = forb_cmd(&args);
        assert_eq!(o.status.code(), Some(64), "args {args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_zero() {
    let o = forb_cmd(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("forb"));
}

#[test]
fn analyze_emits_schema_json() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = dir.path().join("c6.txt");
    write_construct("6", "10", &c6);
    let o = forb_cmd(&["analyze", c6.to_str().unwrap(), "--p", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 10);
    assert_eq!(v["p"], 6);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
    assert_eq!(v["cliques"], serde_json::json!([true, true]));
    assert_eq!(v["order"].as_array().unwrap().len(), 2);
    assert_eq!(v["costs"], serde_json::json!(["0", "0"]));
    assert!(v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| { e["i"].is_u64() && e["j"].is_u64() && e["class"].is_string() }));
    assert!(v.get("cycle").is_none());
}

#[test]
fn analyze_reports_cycle_for_duplicate_rows() {
    let dir = tempfile::tempdir().unwrap();
    let dup = dir.path().join("dup.txt");
    std::fs::write(&dup, "2 2\n10\n10\n").unwrap();
    let o = forb_cmd(&["analyze", dup.to_str().unwrap(), "--p", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.get("cycle").is_some());
    assert_eq!(v["order"], serde_json::json!([]));
    // Two duplicate rows sit in two singleton components; neither has a
    // cost without an ordering.
    assert_eq!(v["costs"], serde_json::json!([null, null]));
}

#[test]
fn analyze_rejects_containing_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.txt");
    write_construct("9", "5", &k5);
    let o = forb_cmd(&["analyze", k5.to_str().unwrap(), "--p", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("contains"), "{}", stderr(&o));
}

#[test]
fn bound_prints_value_status_rate() {
    let o = forb_cmd(&["bound", "--p", "6", "--rows", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("value: 43"), "{out}");
    assert!(out.contains("status: exact"), "{out}");
    assert!(out.contains("c_p: 21/5"), "{out}");

    let o = forb_cmd(&["bound", "--p", "4", "--rows", "8"]);
    let out = stdout(&o);
    assert!(
        out.contains("status: construction-lower-bound-only"),
        "{out}"
    );
}

#[test]
fn construct_variants_differ() {
    let base = forb_cmd(&["construct", "--p", "6", "--rows", "10"]);
    let cycle = forb_cmd(&[
        "construct",
        "--p",
        "6",
        "--rows",
        "10",
        "--variant",
        "cycle",
    ]);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(cycle.status.code(), Some(0));
    assert_ne!(stdout(&base), stdout(&cycle));
    for o in [&base, &cycle] {
        let m = forb::matrix::BinaryMatrix::parse(&stdout(o)).unwrap();
        assert_eq!(m.columns(), 43);
        assert!(forb::containment::avoids_two_row(&m, 6));
    }
}

#[test]
fn enumerate_lists_classes() {
    let o = forb_cmd(&["enumerate", "--rows", "4", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("classes: 1"), "{out}");
    assert!(out.contains("status: exhaustive"), "{out}");
    // The forb --enumerate spelling is the same operation.
    let alias = forb_cmd(&["forb", "--rows", "4", "--p", "3", "--enumerate"]);
    assert_eq!(stdout(&alias), out);
}

#[test]
fn oracle_reports_tightness() {
    let o = forb_cmd(&["oracle", "--k", "4", "--t", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("max_bounded_diff(4, 6) = 11"), "{out}");
    assert!(out.contains("upper_bound_simple(4, 6) = 11"), "{out}");
    assert!(out.contains("tight: true"), "{out}");
}

#[test]
fn conjecture_block_emits_matrix() {
    let o = forb_cmd(&["conjecture-block", "--t", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let m = forb::matrix::BinaryMatrix::parse(&stdout(&o)).unwrap();
    assert_eq!(m.rows(), 5);
    assert_eq!(m.columns(), 31);
}

#[test]
fn jobs_flag_gives_same_value() {
    let a = forb_cmd(&["forb", "--rows", "4", "--p", "4"]);
    let b = forb_cmd(&["forb", "--rows", "4", "--p", "4", "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let line = |o: &Output| stdout(o).lines().next().unwrap_or_default().to_string();
    assert_eq!(line(&a), line(&b));
}

#[test]
fn log_env_enables_debug_output() {
    let o = Command::new(env!("CARGO_BIN_EXE_forb"))
        .args(["forb", "--rows", "3", "--p", "3"])
        .env("FORB_LOG", "debug")
        .output()
        .expect("binary runs");
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("forb_search"), "{}", stderr(&o));
}

#[test]
fn reproduce_quick_budget() {
    let o = forb_cmd(&["reproduce", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("forb(5, p=9)"), "{out}");
    assert!(out.contains(" 0 fail"), "{out}");
}
