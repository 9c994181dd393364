use std::path::Path;
use std::process::{Command, Output};

fn ndooc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndooc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn amops_bound_example() {
    let o = ndooc(&[
        "bound", "--dims", "5x5x5", "--w", "5", "--lambda", "1", "--amops", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "125");
}

#[test]
fn unqualified_bound_lists_everything() {
    let o = ndooc(&["bound", "--dims", "5x3", "--w", "3", "--lambda", "1"]);
    let s = stdout(&o);
    assert!(s.contains("nd") && s.contains("ideal") && s.contains("amops(1)"));
    assert!(s.lines().last().unwrap().ends_with("10"));
}

#[test]
fn bound_json_is_stable() {
    let args = [
        "bound", "--dims", "5x3", "--w", "4", "--lambda", "1", "--json",
    ];
    let a = stdout(&ndooc(&args));
    assert_eq!(a, stdout(&ndooc(&args)));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["min"], "5");
    assert_eq!(v["bounds"][0]["f_exact"]["num"], "5");
}

#[test]
fn construct_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.oocx");
    let o = ndooc(&[
        "construct",
        "spread-lines",
        "--q",
        "2",
        "--k",
        "3",
        "--d",
        "1",
        "--out",
        path_str(&f),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = ndooc(&["verify", path_str(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn verify_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.oocx");
    ndooc(&[
        "construct",
        "conic-lines",
        "--q",
        "2",
        "--out",
        path_str(&f),
    ]);
    let text = std::fs::read_to_string(&f)
        .unwrap()
        .replace("lambda_c 2", "lambda_c 1");
    std::fs::write(&f, text).unwrap();
    let o = ndooc(&["verify", path_str(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("cross-correlation witness"));
}

#[test]
fn report_json_fields() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.oocx");
    ndooc(&[
        "construct",
        "spread-lines",
        "--q",
        "3",
        "--k",
        "3",
        "--d",
        "1",
        "--out",
        path_str(&f),
    ]);
    let o = ndooc(&["report", path_str(&f), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shape"], serde_json::json!([10, 4]));
    assert_eq!(v["measured"]["lambda_a"], 0);
    assert_eq!(v["count"], 30);
    let ideal = v["optimality"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["bound_name"] == "ideal")
        .unwrap();
    assert_eq!(ideal["j_optimal"], true);
    assert_eq!(ideal["ratio"]["num"], "1");
}

#[test]
fn reshape_and_fold_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.oocx");
    let r = dir.path().join("r.oocx");
    let g = dir.path().join("g.oocx");
    ndooc(&[
        "construct",
        "spread-lines",
        "--q",
        "2",
        "--k",
        "5",
        "--d",
        "1",
        "--out",
        path_str(&f),
    ]);
    let o = ndooc(&[
        "reshape",
        path_str(&f),
        "--dims",
        "3x7x3",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ndooc(&["verify", path_str(&r)]).status.code(), Some(0));
    let o = ndooc(&["fold", path_str(&f), "--t1", "3", "--out", path_str(&g)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("630 words"));
    assert_eq!(ndooc(&["verify", path_str(&g)]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ndooc(&["bound", "--dims", "5x3"]).status.code(), Some(2));
    assert_eq!(
        ndooc(&[
            "construct",
            "spread-lines",
            "--q",
            "6",
            "--k",
            "3",
            "--d",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        ndooc(&["construct", "conic-lines", "--q", "16"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ndooc(&["verify", "/definitely/missing.oocx"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ndooc(&["bound", "--dims", "5x0", "--w", "2", "--lambda", "1"])
            .status
            .code(),
        Some(2)
    );
}
