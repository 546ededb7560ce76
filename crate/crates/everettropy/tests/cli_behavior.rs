//! Black-box checks of the command-line binary: exit codes, pinned output
//! bytes, field-naming diagnostics, and the environment tolerance override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_everettropy")
}

fn work_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli_behavior").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn write_fixture(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

const MATRIX_UNIT_01: &str =
    r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[0,0],[1,0]],[[0,0],[0,0]]]}"#;
const SIGMA_Z: &str =
    r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[1,0],[0,0]],[[0,0],[-1,0]]]}"#;
const FLIP: &str =
    r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}"#;
const MIXED_QUBIT: &str =
    r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
const SKEWED_QUBIT: &str =
    r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[0.75,0],[0,0]],[[0,0],[0.25,0]]]}"#;

#[test]
fn szilard_writes_the_advertised_trace() {
    let dir = work_dir("szilard");
    let out = dir.join("trace.csv");
    let output = run(&["szilard", "--molecules", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "stage,subsystem,entropy_bits_per_molecule,entropy_bits_total"
    );
    assert!(csv.lines().any(|line| line == "2,carrier,1.0,1.0"));
    assert!(csv.lines().any(|line| line == "4,qubit,0.0,0.0"));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn szilard_json_snapshot_carries_reduced_states() {
    let dir = work_dir("szilard_json");
    let out = dir.join("trace.csv");
    let output = run(&[
        "szilard",
        "--molecules",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(doc["molecules"], 3);
    assert_eq!(doc["stages"].as_array().unwrap().len(), 5);
    let carrier_mid = &doc["stages"][2]["subsystems"][1];
    assert_eq!(carrier_mid["label"], "carrier");
    assert_eq!(carrier_mid["entropy_bits_per_molecule"], 1.0);
    assert_eq!(carrier_mid["entropy_bits_total"], 3.0);
    let reduced = &carrier_mid["reduced_state"];
    assert_eq!(reduced["layout"][0]["dim"], 2);
    assert_eq!(reduced["matrix"][0][0][0], 0.5);
}

#[test]
fn copy_check_reports_both_verdicts() {
    let dir = work_dir("copy_check");
    let s01 = write_fixture(&dir, "s01.json", MATRIX_UNIT_01);
    let output = run(&["copy-check", "--operator", &s01]);
    assert_eq!(output.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(verdict["copyable"], false);
    assert!(verdict["witness"].is_array());

    let z = write_fixture(&dir, "z.json", SIGMA_Z);
    let verdict: serde_json::Value =
        serde_json::from_str(&stdout_of(&run(&["copy-check", "--operator", &z]))).unwrap();
    assert_eq!(verdict["copyable"], true);
    assert_eq!(verdict["degenerate"], false);
    assert!(verdict["witness"].is_null());

    let saved = dir.join("verdict.json");
    let output = run(&["copy-check", "--operator", &z, "--out", saved.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(on_disk["copyable"], true);
}

#[test]
fn capacity_prints_pinned_numbers() {
    let dir = work_dir("capacity");
    let mixed = write_fixture(&dir, "mixed.json", MIXED_QUBIT);
    assert_eq!(stdout_of(&run(&["capacity", "--state", &mixed])), "0.0\n");

    let skewed = write_fixture(&dir, "skewed.json", SKEWED_QUBIT);
    assert_eq!(
        stdout_of(&run(&["capacity", "--state", &skewed])),
        "0.188721875541\n"
    );

    let experiment = write_fixture(
        &dir,
        "experiment.json",
        r#"{"prior": [0.5, 0.5], "spectrum": [0.75, 0.25], "code": [[0, 1], [1, 0]]}"#,
    );
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_of(&run(&["capacity", "--experiment", &experiment])))
            .unwrap();
    assert_eq!(doc["joint"][0][0], 0.375);
    assert_eq!(doc["joint"][0][1], 0.125);
    assert_eq!(doc["mutual_information_bits"], 0.188721875541);
    assert_eq!(doc["i_max_bits"], 0.188721875541);
    assert_eq!(doc["gap"], 0.0);
}

#[test]
fn branches_and_entropy_report_expected_values() {
    let dir = work_dir("branches");
    let flip = write_fixture(&dir, "flip.json", FLIP);
    let z = write_fixture(&dir, "z.json", SIGMA_Z);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "branches",
        "--unitary",
        &flip,
        "--observable",
        &z,
    ])))
    .unwrap();
    assert_eq!(doc["branching"], true);
    assert_eq!(doc["permutation"], serde_json::json!([1, 0]));

    let skewed = write_fixture(&dir, "skewed.json", SKEWED_QUBIT);
    assert_eq!(
        stdout_of(&run(&["entropy", "--state", &skewed])),
        "0.811278124459\n"
    );
    assert_eq!(
        stdout_of(&run(&["entropy", "--state", &skewed, "--keep", "q"])),
        "0.811278124459\n"
    );
}

#[test]
fn failures_exit_one_with_named_fields() {
    let dir = work_dir("failures");

    let missing = dir.join("nope.json");
    let output = run(&["copy-check", "--operator", missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let diagnostic = stderr_of(&output);
    assert!(diagnostic.starts_with("error: "), "{diagnostic}");
    assert!(diagnostic.contains("nope.json"), "{diagnostic}");
    assert_eq!(diagnostic.trim_end().lines().count(), 1);

    let garbled = write_fixture(&dir, "garbled.json", "{broken");
    let output = run(&["entropy", "--state", &garbled]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("invalid JSON"));

    let output = run(&[
        "selection", "--dim-a", "2", "--dim-b", "2", "--noise", "0.1", "--seeds", "0",
        "--seed", "1", "--out", dir.join("sel.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("seeds"));

    let skewed = write_fixture(&dir, "skewed.json", SKEWED_QUBIT);
    let output = run(&["entropy", "--state", &skewed, "--keep", " , "]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("keep"));

    let output = run(&["capacity"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["no-such-subcommand"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8(output.stdout).unwrap().contains("Usage"));
}

#[test]
fn environment_variable_loosens_the_operator_tolerance() {
    let dir = work_dir("env_tol");
    let slightly_non_normal = write_fixture(
        &dir,
        "almost_z.json",
        r#"{"layout": [{"label": "q", "dim": 2}], "matrix": [[[1,0],[0.000001,0]],[[0,0],[-1,0]]]}"#,
    );

    let strict: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "copy-check",
        "--operator",
        &slightly_non_normal,
    ])))
    .unwrap();
    assert_eq!(strict["copyable"], false);

    let relaxed_output = Command::new(bin())
        .args(["copy-check", "--operator", &slightly_non_normal])
        .env("EVERETTROPY_TOL", "0.001")
        .output()
        .unwrap();
    let relaxed: serde_json::Value =
        serde_json::from_str(&stdout_of(&relaxed_output)).unwrap();
    assert_eq!(relaxed["copyable"], true);
}
