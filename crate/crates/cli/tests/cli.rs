//! End-to-end checks of the command-line surface: byte-stable output,
//! exit codes, machine-readable error names, and the precision environment
//! variable.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iwasawa"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn decompose_output_is_byte_stable() {
    let args = ["gln", "decompose", "--p", "5", "--prec", "12", "--matrix", r#"[["1","2"],["3","4"]]"#];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["certificate"], "b*u*s == g @prec12");
    assert_eq!(v["s"], serde_json::json!([0, 1]));
}

#[test]
fn convolve_diracs_is_dirac_at_product() {
    let a = r#"{"tower":{"kind":"zp","p":3},"level":1,"prec":8,"coeffs":{"1":"1"}}"#;
    let b = r#"{"tower":{"kind":"zp","p":3},"level":1,"prec":8,"coeffs":{"2":"1"}}"#;
    let out = run(&["measure", "convolve", "--a", a, "--b", b]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coeffs"], serde_json::json!({"0": "1"}));
}

#[test]
fn malformed_json_maps_to_parse_error() {
    let out = run(&["measure", "project", "--mu", "{not json", "--level", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "ParseError");
}

#[test]
fn domain_errors_carry_their_names() {
    // division by exact zero
    let out = run(&["padic", "eval", "--op", "div", "--p", "5", "--x", "\"1\"", "--y", "\"0\""]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "DivisionByZero");
    // subgroup that is not closed
    let out = run(&[
        "induce",
        "dual-check",
        "--group",
        r#"{"kind":"finite","table":[[0,1,2],[1,2,0],[2,0,1]]}"#,
        "--subgroup",
        "[0,1]",
        "--rep",
        r#"{"p":7,"dim":1,"action":{"0":[["1"]],"1":[["1"]]}}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "NotASubgroup");
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_sets_default_precision() {
    let out = bin()
        .args(["padic", "eval", "--op", "add", "--p", "3", "--x", "\"1\"", "--y", "\"1\""])
        .env("IWASAWA_PREC", "7")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["prec"], 7);
    // per-command flag wins over the environment
    let out = bin()
        .args(["padic", "eval", "--op", "add", "--p", "3", "--prec", "9", "--x", "\"1\"", "--y", "\"1\""])
        .env("IWASAWA_PREC", "7")
        .output()
        .expect("binary runs");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["prec"], 9);
}

#[test]
fn dual_check_reports_pass_and_gram() {
    let out = run(&[
        "induce",
        "dual-check",
        "--group",
        r#"{"kind":"finite","table":[[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]}"#,
        "--subgroup",
        "[0,2]",
        "--rep",
        r#"{"p":5,"prec":12,"dim":1,"action":{"0":[["1"]],"2":[["-1"]]}}"#,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["rank"], 2);
}

#[test]
fn act_identity_fixes_the_point() {
    let out = run(&[
        "induce", "act", "--p", "5", "--g", r#"[["1","0"],["0","1"]]"#, "--k",
        r#"[["1","0"],["2","1"]]"#, "--m", r#"["3"]"#, "--exponents", "[1,0]",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"][1][0]["unit"], "2");
    assert_eq!(v["m"][0]["unit"], "3");
}

#[test]
fn abs_reports_exact_rational_norm() {
    let out = run(&["padic", "eval", "--op", "abs", "--p", "3", "--x", "\"12\""]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["abs"], "1/3");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("iwasawa-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("result.json");
    let out = bin()
        .args([
            "--out",
            path.to_str().unwrap(),
            "padic",
            "eval",
            "--op",
            "mul",
            "--p",
            "2",
            "--x",
            "\"6\"",
            "--y",
            "\"2\"",
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["val"], 2);
    assert_eq!(v["result"]["unit"], "3");
    std::fs::remove_dir_all(&dir).unwrap();
}
