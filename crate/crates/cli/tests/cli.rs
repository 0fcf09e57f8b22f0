use std::path::PathBuf;
use std::process::{Command, Output};

fn boyd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boyd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("boyd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn norm_examples() {
    let out = boyd(&["norm", "--space", "lp:2", "--fn", "[[4,1]]"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2");

    let out = boyd(&["norm", "--space", "lorentz:2,1", "--fn", "[[4,1]]"]);
    assert_eq!(stdout(&out), "4");

    let m = scratch("diag.json", r#"{"n":3,"re":[[3,0,0],[0,1,0],[0,0,2]]}"#);
    let out = boyd(&["norm", "--space", "lp:1", "--matrix", m.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "6");
}

#[test]
fn norm_reads_csv() {
    let f = scratch("f.csv", "4,1\n");
    let out = boyd(&["norm", "--space", "lp:2", "--fn", f.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "2");
}

#[test]
fn indices_examples() {
    assert_eq!(stdout(&boyd(&["indices", "--space", "lorentz:3,1"])), "(3, 3) analytic");
    assert_eq!(stdout(&boyd(&["indices", "--space", "lp:1"])), "(1, 1) analytic");
    let fit = stdout(&boyd(&["indices", "--space", "orlicz:power:2"]));
    assert!(fit.starts_with("(2.000000, 2.000000) matuszewska-fit"), "{fit}");
}

#[test]
fn parse_errors_exit_2_and_name_the_token() {
    let out = boyd(&["norm", "--space", "lq:2", "--fn", "[[4,1]]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lq"));

    let out = boyd(&["verify", "--suite", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = boyd(&["verify", "--suite", "dist-formulas", "--seed", "7", "--cases", "50"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(report["max_violation"].as_f64().unwrap() <= 1e-12);

    // rounding-level margins count once the tolerance is zero
    let strict = boyd(&["verify", "--suite", "dist-formulas", "--cases", "50", "--tol", "0"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn burkholder_rosenthal_records_constants() {
    let out = boyd(&[
        "verify",
        "--suite",
        "burkholder-rosenthal",
        "--seed",
        "7",
        "--cases",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let constants = report["constants"].as_object().unwrap();
    for key in [
        "br_l3_s_over_max",
        "br_l3_max_over_s",
        "br_l4_s_over_max",
        "br_l4_max_over_s",
    ] {
        assert!(constants[key].as_f64().unwrap() > 0.0, "{key}");
    }
}

#[test]
fn reports_are_deterministic() {
    let run = |name: &str| {
        let path = std::env::temp_dir().join(format!("boyd-cli-{}-{name}.json", std::process::id()));
        let out = boyd(&[
            "verify",
            "--suite",
            "rearrangement-props",
            "--seed",
            "3",
            "--cases",
            "40",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}
