use smtlab_cli::runner::STOCHASTIC_CHECKS;
use smtlab_cli::{parse_scenario, run, select_checks, RunOptions, ScenarioError, SelectError, Status, CHECK_NAMES};

const LINE: &str = r#"
name = "line"

[variety]
ambient = 1

[hypersurfaces]
members = ["x1", "x1 - x0", "x1 + x0", "x1 - i*x0"]

[curve]
components = ["1", "z"]
"#;

fn with_params(extra: &str) -> String {
    format!("{LINE}\n[params]\n{extra}\n")
}

#[test]
fn minimal_scenario_uses_defaults() {
    let s = parse_scenario(LINE).unwrap();
    let p = s.params();
    assert_eq!(p.nodes, 4096);
    assert_eq!(p.samples, 100_000);
    assert_eq!(p.checks, ["*"]);
    assert_eq!(s.instance.q(), 4);
    assert_eq!(s.instance.truncation(), 1);
}

#[test]
fn geometric_radii_are_expanded() {
    let s = parse_scenario(&with_params("radii = { start = 2.0, stop = 32.0, count = 5 }")).unwrap();
    let radii = s.params().radii.values().unwrap();
    for (r, expected) in radii.iter().zip([2.0, 4.0, 8.0, 16.0, 32.0]) {
        assert!((r - expected).abs() < 1e-12);
    }
}

#[test]
fn invalid_params_are_rejected() {
    for bad in ["nodes = 1000", "delta_big = 1.0", "workers = 0", "radii = [0.5, 2.0]", "epsilon = -1.0", "max_step = 0.0"] {
        assert!(matches!(parse_scenario(&with_params(bad)), Err(ScenarioError::Param(_))), "{bad}");
    }
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(matches!(parse_scenario(&with_params("nodez = 4096")), Err(ScenarioError::Toml(_))));
}

#[test]
fn parse_errors_name_the_field() {
    let text = LINE.replace("\"x1 - x0\"", "\"x1 - * x0\"");
    match parse_scenario(&text) {
        Err(ScenarioError::Poly { field, .. }) => assert_eq!(field, "hypersurfaces.members[1]"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn declared_degrees_must_match() {
    let text = LINE.replace("[curve]", "degrees = [1, 1, 2, 1]\n\n[curve]");
    assert!(matches!(parse_scenario(&text), Err(ScenarioError::DeclaredDegree { declared: 2, actual: 1, .. })));
}

#[test]
fn constant_curve_is_rejected() {
    let text = LINE.replace("[\"1\", \"z\"]", "[\"1\", \"2\"]");
    assert!(matches!(parse_scenario(&text), Err(ScenarioError::Curve(_))));
}

#[test]
fn check_selection() {
    let all = select_checks(&["*".into()]).unwrap();
    assert_eq!(all, CHECK_NAMES);
    let mc = select_checks(&["mc-*".into()]).unwrap();
    assert!(mc.iter().all(|c| STOCHASTIC_CHECKS.contains(c)));
    assert_eq!(mc.len(), 4);
    // Order follows the report, not the filter.
    assert_eq!(select_checks(&["smt".into(), "fmt".into()]).unwrap(), ["fmt", "smt"]);
    assert_eq!(select_checks(&["fmtt".into()]), Err(SelectError::Unknown("fmtt".into())));
}

#[test]
fn run_without_second_curve_marks_uniqueness_vacuous() {
    let s = parse_scenario(LINE).unwrap();
    let options = RunOptions { checks: Some(vec!["uniqueness".into(), "lemma41".into()]), ..RunOptions::default() };
    let report = run(&s, &options).unwrap();
    assert_eq!(report.checks[0].name, "lemma41");
    assert_eq!(report.checks[1].status, Status::Vacuous);
    assert_eq!(report.summary, Status::Pass);
}

#[test]
fn mc_radius_is_nudged_off_zeros() {
    // (1, z) against x1 - 2x0 puts a zero on |z| = 2.
    let text = LINE.replace("\"x1 - i*x0\"", "\"x1 - 2*x0\"") + "\n[params]\nmc_radius = 2.0\nsamples = 50\n";
    let s = parse_scenario(&text).unwrap();
    let report = run(&s, &RunOptions { checks: Some(vec!["mc-jensen".into()]), ..RunOptions::default() }).unwrap();
    assert_ne!(report.checks[0].status, Status::Error, "{:?}", report.checks[0].error);
    let r = report.checks[0].report.as_ref().unwrap().rows[0].r;
    assert!(r != 2.0 && (r - 2.0).abs() < 0.03, "{r}");
}
