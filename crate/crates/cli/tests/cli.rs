//! End-to-end tests of the `kuiper` binary: exit codes, fixture outputs,
//! determinism, and the verify report contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kuiper(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kuiper"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "u03.json",
        r#"{"segments":[{"from":"0","to":"3","density":"1/3"}]}"#,
    );
    write(
        dir.path(),
        "u12.json",
        r#"{"segments":[{"from":"1","to":"2","density":"1"}]}"#,
    );
    write(
        dir.path(),
        "dirac0.json",
        r#"{"atoms":[{"at":"0","mass":"1"}]}"#,
    );
    dir
}

#[test]
fn dist_fixture_with_witness() {
    let dir = setup();
    let out = kuiper(
        &["dist", "--metric", "kuiper", "--witness", "u03.json", "u12.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("2/3 exact"), "{text}");
    assert!(text.contains("witness [1,2] signed=-2/3"), "{text}");

    let out = kuiper(&["dist", "--metric", "ks", "u03.json", "u12.json"], dir.path());
    assert!(stdout(&out).contains("1/3 exact"));

    let out = kuiper(
        &["dist", "--metric", "ks", "u03.json", "u03.json"],
        dir.path(),
    );
    assert!(stdout(&out).contains("0 exact"));
}

#[test]
fn malformed_json_exits_1_with_position() {
    let dir = setup();
    write(dir.path(), "bad.json", "{\"atoms\": [}");
    let out = kuiper(&["dist", "bad.json", "u03.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("column"), "{err}");
}

#[test]
fn transform_inversion_and_mass_deficiency() {
    let dir = setup();
    let out = kuiper(
        &["transform", "--r-pole", "0", "u12.json", "--output", "t.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("t.json")).unwrap();
    assert!(text.contains("\"from\": \"1/2\""), "{text}");
    assert!(text.contains("\"a\": \"2\""), "{text}");

    let out = kuiper(&["transform", "--r-pole", "0", "dirac0.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("exceptional point 0"), "{err}");
}

#[test]
fn identity_transform_is_byte_identical() {
    let dir = setup();
    write(dir.path(), "id.json", r#"{"r_pole":"inf"}"#);
    kuiper(
        &["gen", "--kind", "distribution", "--seed", "3", "--output", "d.json"],
        dir.path(),
    );
    let out = kuiper(
        &["transform", "--map", "id.json", "d.json", "--output", "same.json"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(
        fs::read(dir.path().join("d.json")).unwrap(),
        fs::read(dir.path().join("same.json")).unwrap()
    );
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = setup();
    for kind in ["distribution", "map"] {
        kuiper(
            &["gen", "--kind", kind, "--seed", "11", "--complexity", "large", "--output", "a.json"],
            dir.path(),
        );
        kuiper(
            &["gen", "--kind", kind, "--seed", "11", "--complexity", "large", "--output", "b.json"],
            dir.path(),
        );
        assert_eq!(
            fs::read(dir.path().join("a.json")).unwrap(),
            fs::read(dir.path().join("b.json")).unwrap()
        );
    }
    // Generated distributions parse and have exact mass 1: dist to itself
    // works and is 0.
    kuiper(
        &["gen", "--kind", "distribution", "--seed", "11", "--output", "a.json"],
        dir.path(),
    );
    let out = kuiper(&["dist", "a.json", "a.json"], dir.path());
    assert!(stdout(&out).contains("0 exact"));
}

#[test]
fn support_and_characterize() {
    let dir = setup();
    write(
        dir.path(),
        "blocks.json",
        r#"{"segments":[{"from":"0","to":"1","density":"1/2"},{"from":"2","to":"3","density":"1/2"}]}"#,
    );
    let out = kuiper(&["support", "blocks.json"], dir.path());
    assert!(stdout(&out).contains("[0,1]"));
    let out = kuiper(&["support", "--co", "blocks.json"], dir.path());
    let text = stdout(&out);
    assert!(text.contains("hull: (0,3)"), "{text}");
    assert!(text.contains("[1,2]"), "{text}");

    write(
        dir.path(),
        "ingap.json",
        r#"{"segments":[{"from":"6/5","to":"9/5","density":"5/3"}]}"#,
    );
    let out = kuiper(&["characterize", "blocks.json", "ingap.json"], dir.path());
    assert!(stdout(&out).contains("unit distant: yes"));
    let out = kuiper(&["characterize", "blocks.json", "u03.json"], dir.path());
    assert!(stdout(&out).contains("unit distant: no"));
    // Regions of a Dirac measure are rejected.
    let out = kuiper(&["characterize", "dirac0.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quantize_fixture() {
    let dir = setup();
    write(
        dir.path(),
        "u01.json",
        r#"{"segments":[{"from":"0","to":"1","density":"1"}]}"#,
    );
    let out = kuiper(&["quantize", "-n", "4", "u01.json"], dir.path());
    let text = stdout(&out);
    for at in ["\"at\": \"0\"", "\"at\": \"1/4\"", "\"at\": \"1/2\"", "\"at\": \"3/4\""] {
        assert!(text.contains(at), "{text}");
    }
    assert!(text.contains("\"mass\": \"1/4\""));
}

#[test]
fn verify_exit_codes_and_report() {
    let dir = setup();
    let out = kuiper(
        &[
            "verify", "--suite", "dirac", "--seed", "5", "--trials", "20", "--report", "rep.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert_eq!(report[0]["suite"], "dirac");
    assert_eq!(report[0]["failure_count"], 0);
    assert_eq!(report[0]["trials"], 20);

    // Same invocation twice gives the identical report apart from timing.
    let out2 = kuiper(
        &["verify", "--suite", "dirac", "--seed", "5", "--trials", "20", "--format", "json"],
        dir.path(),
    );
    let mut r1 = report.clone();
    let mut r2: serde_json::Value = serde_json::from_str(&stdout(&out2)).unwrap();
    r1[0]["wall_ms"] = 0.into();
    r2[0]["wall_ms"] = 0.into();
    assert_eq!(r1, r2);

    let out = kuiper(&["verify", "--suite", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
