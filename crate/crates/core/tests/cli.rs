use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ks-collapse"))
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn passing_scenario_exits_zero() {
    let path = manifest("scenarios/prop1-square-witness.json");
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] prop1-square-witness"));
}

#[test]
fn contradicted_expectation_exits_one() {
    let path = manifest("tests/fixtures/noncontextual-update-equal.json");
    assert_eq!(code(&run(&["run", path.to_str().unwrap()])), 1);
}

#[test]
fn malformed_matrix_exits_two() {
    let path = manifest("tests/fixtures/non-square-observable.json");
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("square"));
}

#[test]
fn missing_file_exits_two() {
    assert_eq!(code(&run(&["run", "/nonexistent/scenario.json"])), 2);
}

#[test]
fn dimension_guard_exits_two() {
    let path = manifest("scenarios/valuation-peres-mermin.json");
    assert_eq!(
        code(&run(&["run", path.to_str().unwrap(), "--max-dim", "2"])),
        2
    );
}

#[test]
fn empty_suite_exits_zero() {
    let dir = std::env::temp_dir().join(format!("ks-collapse-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&["suite", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 scenarios"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suite_with_failing_scenario_exits_one() {
    let dir = std::env::temp_dir().join(format!("ks-collapse-failing-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for src in [
        "scenarios/ttt-square-qubit.json",
        "tests/fixtures/noncontextual-update-equal.json",
    ] {
        let src = manifest(src);
        std::fs::copy(&src, dir.join(src.file_name().unwrap())).unwrap();
    }
    assert_eq!(code(&run(&["suite", dir.to_str().unwrap()])), 1);
    // the filter can select only the passing scenario
    assert_eq!(
        code(&run(&["suite", dir.to_str().unwrap(), "--cases", "ttt"])),
        0
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bundled_suite_json_is_reproducible() {
    let dir = manifest("scenarios");
    let tmp = std::env::temp_dir();
    let a = tmp.join(format!("ks-collapse-a-{}.json", std::process::id()));
    let b = tmp.join(format!("ks-collapse-b-{}.json", std::process::id()));
    for p in [&a, &b] {
        let out = run(&[
            "suite",
            dir.to_str().unwrap(),
            "--seed",
            "7",
            "--tol",
            "1e-9",
            "--json",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed_override"], 7);
    assert!(v["scenarios"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["config"]["seed"] == 7));
    std::fs::remove_file(a).unwrap();
    std::fs::remove_file(b).unwrap();
}
