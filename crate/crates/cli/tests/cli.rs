use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn smtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smtlab")).args(args).env_remove("SMTLAB_SEED").output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn validate_accepts_bundled_scenarios() {
    for name in ["p1-four-points", "p2-lines", "p2-mixed", "conic", "p3-quadric", "twisted-cubic", "repeated-points"] {
        let out = smtlab(&["validate", scenario(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out.stderr));
        assert!(text(&out.stdout).contains(&format!("{name}: ok")));
    }
}

#[test]
fn validate_reports_degenerate_curve_with_witness() {
    let out = smtlab(&["validate", scenario("degenerate").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("x1 - x2"), "{}", text(&out.stderr));
}

#[test]
fn validate_rejects_curve_off_the_variety() {
    let out = smtlab(&["validate", scenario("off-variety").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_file_is_a_scenario_error() {
    let out = smtlab(&["validate", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_check_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = smtlab(&[
        "run",
        scenario("p1-four-points").to_str().unwrap(),
        "--checks",
        "fmt,nonsense",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(64));
    let err = text(&out.stderr);
    assert!(err.contains("nonsense") && err.contains("mc-coarea") && err.contains("lemma41"), "{err}");
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(smtlab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(smtlab(&["run"]).status.code(), Some(64));
    assert_eq!(smtlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn glob_selects_only_stochastic_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = smtlab(&[
        "run",
        scenario("p1-four-points").to_str().unwrap(),
        "--checks",
        "mc-*",
        "--samples",
        "400",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some_and(|c| c == 0 || c == 2), "{}", text(&out.stderr));
    let mut csvs: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(
        csvs,
        ["mc-characteristic", "mc-coarea", "mc-exit", "mc-jensen"]
            .map(|c| format!("p1-four-points.{c}.csv"))
    );
}

#[test]
fn exact_checks_pass_and_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = smtlab(&[
        "run",
        scenario("p2-lines").to_str().unwrap(),
        "--checks",
        "fmt,jensen,divisor-inequality,smt,uniqueness",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p2-lines.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"], "pass");
    assert_eq!(summary["checks"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(dir.path().join("p2-lines.fmt.csv")).unwrap();
    assert!(csv.starts_with("check,r,value,margin\n"));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_smtlab"))
        .args([
            "run",
            scenario("p1-four-points").to_str().unwrap(),
            "--checks",
            "lemma41",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .env("SMTLAB_SEED", "777")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p1-four-points.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["environment"]["seed"], 777);
}

#[test]
fn bounds_table_for_the_repeated_family() {
    let out = smtlab(&["bounds", scenario("repeated-points").to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let table: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table["distributive"], "0");
    assert_eq!(table["subgeneral"], "0");
    assert_eq!(table["subgeneral_n"], 2);
    assert_eq!(table["delta"], "2");
}

#[test]
fn bounds_table_for_lines_in_the_plane() {
    let out = smtlab(&["bounds", scenario("p2-lines").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = text(&out.stdout);
    let row = |label: &str| {
        table.lines().find(|l| l.starts_with(label)).map(|l| l[label.len()..].trim().to_string()).unwrap()
    };
    assert_eq!(row("q - Delta(M+1)"), "2");
    assert_eq!(row("q - (2N-k+1)H/(k+1)"), "2");
}
