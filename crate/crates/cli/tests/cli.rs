//! End-to-end tests of the command line: golden outputs and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn wknot() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wknot"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(format!(
        "{}/../../corpus/{name}.gauss",
        env!("CARGO_MANIFEST_DIR")
    ))
}

fn run_ok(mut cmd: Command) -> String {
    let out = cmd.output().expect("spawning wknot");
    assert!(
        out.status.success(),
        "command failed: {}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn dims_w_row() {
    let out = run_ok({
        let mut c = wknot();
        c.args([
            "dims",
            "--space",
            "w",
            "--skeleton",
            "line",
            "--max-degree",
            "5",
        ]);
        c
    });
    assert_eq!(out.trim(), "1 2 4 7 12 19");
}

#[test]
fn dims_sw_row_and_v_row() {
    let out = run_ok({
        let mut c = wknot();
        c.args(["dims", "--space", "sw", "--max-degree", "5"]);
        c
    });
    assert_eq!(out.trim(), "1 1 2 3 5 7");
    let out = run_ok({
        let mut c = wknot();
        c.args(["dims", "--space", "v", "--max-degree", "2"]);
        c
    });
    assert_eq!(out.trim(), "1 2 7");
}

#[test]
fn dims_json_format() {
    let out = run_ok({
        let mut c = wknot();
        c.args([
            "dims",
            "--space",
            "rw",
            "--max-degree",
            "3",
            "--format",
            "json",
        ]);
        c
    });
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["dims"], serde_json::json!([1, 0, 1, 1]));
    assert_eq!(v["capped"], serde_json::json!(false));
}

#[test]
fn dims_cap_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("low.conf");
    std::fs::write(&cfg, "v_max=3\n").unwrap();
    let out = run_ok({
        let mut c = wknot();
        c.arg("--config").arg(&cfg);
        c.args(["dims", "--space", "v", "--max-degree", "9"]);
        c
    });
    assert_eq!(out.trim(), "1 2 7 27 (cap reached)");
}

#[test]
fn alexander_values() {
    for (name, expect) in [
        ("unknot", "1"),
        ("trefoil", "X-1+X^-1"),
        ("8_17", "-X^3+4X^2-8X+11-8X^-1+4X^-2-X^-3"),
    ] {
        let out = run_ok({
            let mut c = wknot();
            c.arg("alexander").arg(corpus(name));
            c
        });
        assert_eq!(out.trim(), expect, "{name}");
    }
}

#[test]
fn alexander_parse_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gauss");
    std::fs::write(&bad, "O1+ U1-").unwrap();
    let out = wknot().arg("alexander").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("different signs"));
}

#[test]
fn expand_kink_degree_one() {
    let out = run_ok({
        let mut c = wknot();
        c.arg("expand").arg(corpus("kink"));
        c.args(["--degree", "1", "--wheels"]);
        c
    });
    assert_eq!(out.trim(), r#"{"1":"1","DA":"1"}"#);
}

#[test]
fn expand_empty_diagram() {
    let out = run_ok({
        let mut c = wknot();
        c.arg("expand").arg(corpus("unknot"));
        c.args(["--degree", "2", "--wheels"]);
        c
    });
    assert_eq!(out.trim(), r#"{"1":"1"}"#);
}

#[test]
fn expand_trefoil_check_alexander_passes() {
    let out = run_ok({
        let mut c = wknot();
        c.arg("expand").arg(corpus("trefoil"));
        c.args(["--degree", "4", "--check-alexander", "--euler"]);
        c
    });
    assert!(out.trim().ends_with("pass"), "got: {out}");
}

#[test]
fn kv_solve_and_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kv2.json");
    let out = run_ok({
        let mut c = wknot();
        c.args(["kv-solve", "--degree", "2", "--out"]);
        c.arg(&path);
        c
    });
    assert!(out.contains("self-check: all equations pass"), "got: {out}");
    let out = run_ok({
        let mut c = wknot();
        c.arg("kv-verify").arg(&path);
        c
    });
    assert!(out.trim().ends_with("pass"));
}

#[test]
fn kv_solve_degree_four_prints_duflo_line() {
    let out = run_ok({
        let mut c = wknot();
        c.args(["kv-solve", "--degree", "4"]);
        c
    });
    assert!(
        out.contains("duflo even part: x^2: 1/48, x^4: -1/5760"),
        "got: {out}"
    );
}

#[test]
fn kv_verify_corrupted_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"N\": 1}").unwrap();
    let out = wknot().arg("kv-verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kv_verify_perturbed_solution_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kv3.json");
    run_ok({
        let mut c = wknot();
        c.args(["kv-solve", "--degree", "3", "--out"]);
        c.arg(&path);
        c
    });
    // inject a fault into b
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["b"]["xxy"] = serde_json::Value::String("1/7".into());
    std::fs::write(&path, v.to_string()).unwrap();
    let out = wknot().arg("kv-verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "got: {stdout}");
}

#[test]
fn braid_act_example() {
    let out = run_ok({
        let mut c = wknot();
        c.args(["braid", "act", "--n", "2", "--word", "p1", "--on", "x1"]);
        c
    });
    assert_eq!(out.trim(), "x2");
    let out = run_ok({
        let mut c = wknot();
        c.args(["braid", "act", "--n", "2", "--word", "p1", "--on", "x2"]);
        c
    });
    assert_eq!(out.trim(), "x2 x1 X2");
}

#[test]
fn braid_z_log_of_sigma_squared() {
    // sigma_1^2 reads positionally: the second crossing is strand 2 over
    // strand 1, so the log is bch(a12, a21), not 2 a12
    let out = run_ok({
        let mut c = wknot();
        c.args([
            "braid", "z-log", "--n", "2", "--word", "p1p1", "--degree", "2",
        ]);
        c
    });
    assert!(out.contains("permutation: [1, 2]"));
    assert!(out.contains("1\u{b7}a21 + 1\u{b7}a12"), "got: {out}");
}

#[test]
fn braid_check_relations() {
    let out = run_ok({
        let mut c = wknot();
        c.args(["braid", "check-relations", "--n", "3", "--degree", "4"]);
        c
    });
    assert!(out.contains("all "), "got: {out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn config_file_is_honored_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wknot.conf");
    std::fs::write(&cfg, "format=json\nknot_degree=1\n").unwrap();
    // config format=json applies
    let out = run_ok({
        let mut c = wknot();
        c.arg("--config").arg(&cfg);
        c.args(["dims", "--space", "w", "--max-degree", "1"]);
        c
    });
    assert!(out.trim_start().starts_with('{'), "got: {out}");
    // flag overrides the config
    let out = run_ok({
        let mut c = wknot();
        c.arg("--config").arg(&cfg);
        c.args([
            "dims",
            "--space",
            "w",
            "--max-degree",
            "1",
            "--format",
            "text",
        ]);
        c
    });
    assert_eq!(out.trim(), "1 2");
    // the env variable points at the same file
    let out = run_ok({
        let mut c = wknot();
        c.env("WKNOT_CONFIG", &cfg);
        c.arg("expand").arg(corpus("kink"));
        c.arg("--wheels");
        c
    });
    assert_eq!(out.trim(), r#"{"1":"1","DA":"1"}"#);
}

#[test]
fn usage_error_exits_2() {
    let out = wknot()
        .args(["dims", "--space", "bogus", "--max-degree", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
