use etj_core::experiment::{
    merge_reports, parse_weight, run_experiment, stable_json, ExperimentConfig, Format, KernelChoice, JACKSON_HEADER,
};
use etj_core::Error;

fn config(dir: &std::path::Path, extra: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.apply_text(&format!("n_samples = 512\nr_grid = 1:16:5\nout = {}\n{extra}", dir.display()))
        .unwrap();
    c
}

#[test]
fn parse_errors_carry_line_numbers() {
    let mut c = ExperimentConfig::default();
    let err = c.apply_text("# header\nk = 1\n\nbackend = torus\n").unwrap_err();
    match err {
        Error::Config { line, message } => {
            assert_eq!(line, 4);
            assert!(message.starts_with("backend"));
        }
        e => panic!("unexpected {e:?}"),
    }
    assert!(matches!(c.apply_text("k 1"), Err(Error::Config { line: 1, .. })));
    assert!(matches!(c.apply_text("colour = red"), Err(Error::Config { line: 1, .. })));
    assert!(c.apply_text("r_grid = 1:2").is_err());
    assert!(c.apply_text("corpus = abs-sin, nope").is_err());
}

#[test]
fn validation_rules() {
    let mut c = ExperimentConfig::default();
    c.apply_text("backend = line\ncorpus = bump\nr_grid = 0.5:8:4").unwrap();
    assert!(c.validate().is_err());
    c.set("r_grid", "1:8:4", 0).unwrap();
    c.validate().unwrap();
    c.set("corpus", "sawtooth", 0).unwrap();
    assert!(c.validate().is_err());
    let mut p = ExperimentConfig::default();
    p.set("r_grid", "0.25:4:5", 0).unwrap();
    p.validate().unwrap();
    p.set("k", "0", 0).unwrap();
    assert!(p.validate().is_err());
}

#[test]
fn weight_specs() {
    assert_eq!(parse_weight("poly:1:2").unwrap().value(1.0), 4.0);
    assert!((parse_weight("exp_power:0.5").unwrap().value(4.0) - 2f64.exp()).abs() < 1e-12);
    assert!((parse_weight("group:1").unwrap().value(1.0) - 8.0).abs() < 1e-12);
    let w = parse_weight("group:1:exp_power:0.5").unwrap();
    assert!((w.value(4.0) - 2f64.exp() * 125.0).abs() < 1e-9);
    assert!(parse_weight("carleman:2").is_ok());
    assert!(parse_weight("entire:2:1:2").is_ok());
    assert!(parse_weight("poly:x:2").is_err());
    assert!(parse_weight("spline:3").is_err());
    assert_eq!("fejer:2".parse::<KernelChoice>().unwrap(), KernelChoice::Fejer(2));
}

#[test]
fn constant_corpus_is_degenerate_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path(), "corpus = constant\n")).unwrap();
    assert!(out.passed());
    assert_eq!(out.reports[0].verdict.as_str(), "PASS-degenerate");
}

#[test]
fn csv_rows_form_the_cartesian_product() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(dir.path(), "corpus = abs-sin,sawtooth,trig-poly\nk = 1,2\n");
    let out = run_experiment(&c).unwrap();
    assert!(out.passed(), "{:?}", out.failures);
    let csv = std::fs::read_to_string(dir.path().join("jackson.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(JACKSON_HEADER));
    assert_eq!(lines.count(), 5 * 3 * 2);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    for rep in summary["reports"].as_array().unwrap() {
        for key in ["sup_ratio", "constant_estimate", "verdict"] {
            assert!(rep.get(key).is_some(), "{key}");
        }
    }
    assert_eq!(summary["verdict"], "PASS");
    let modulus = std::fs::read_to_string(dir.path().join("modulus.csv")).unwrap();
    assert_eq!(modulus.lines().count(), 1 + 5 * 3 * 2);
}

#[test]
fn json_format_and_derivative_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), "corpus = random-trig\nm = 1,2\n");
    c.format = Format::Json;
    let out = run_experiment(&c).unwrap();
    assert!(out.passed(), "{:?}", out.failures);
    assert_eq!(out.reports.len(), 3);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("jackson.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert!(v[1]["derivative"]["slope"].is_number());
}

#[test]
fn refusals_become_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path(), "corpus = abs-sin\nm = 2\n")).unwrap();
    assert!(!out.passed());
    assert!(out.failures[0].contains("m=2"));
}

#[test]
fn line_experiment_runs() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        dir.path(),
        "backend = line\ncorpus = bump,gaussian\nn_samples = 1024\nr_grid = 1:8:4\n",
    );
    let out = run_experiment(&c).unwrap();
    assert!(out.passed(), "{:?}", out.failures);
    assert!(out.reports.iter().all(|r| r.rows.iter().all(|row| row.method.as_str() == "smoothing_upper")));
}

#[test]
fn merge_concatenates_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = tempfile::tempdir().unwrap();
    run_experiment(&config(a.path(), "corpus = sawtooth\n")).unwrap();
    run_experiment(&config(b.path(), "corpus = trig-poly\nk = 2\n")).unwrap();
    merge_reports(&[a.path().to_path_buf(), b.path().to_path_buf()], m.path()).unwrap();
    let csv = std::fs::read_to_string(m.path().join("jackson.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(m.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert_eq!(v["verdict"], "PASS");
    assert!(merge_reports(&[], m.path()).is_err());
}

#[test]
fn stable_json_sorts_keys_and_fixes_digits() {
    #[derive(serde::Serialize)]
    struct S {
        zeta: f64,
        alpha: f64,
        count: usize,
        missing: f64,
    }
    let s = stable_json(&S {
        zeta: 0.1,
        alpha: 2.0,
        count: 3,
        missing: f64::NAN,
    })
    .unwrap();
    assert_eq!(
        s,
        "{\n  \"alpha\": 2.0000000000000000e+0,\n  \"count\": 3,\n  \"missing\": null,\n  \"zeta\": 1.0000000000000001e-1\n}\n"
    );
}
