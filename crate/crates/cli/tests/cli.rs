use std::path::Path;
use std::process::{Command, Output};

fn etj(args: &[&str]) -> Output {
    etj_env(args, &[])
}

fn etj_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_etj"));
    cmd.args(args).env_remove("ETJ_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn quick_run(out: &Path, corpus: &str) -> Output {
    etj(&[
        "jackson",
        "run",
        "--corpus",
        corpus,
        "--r-grid",
        "1:16:5",
        "--set",
        "n_samples=512",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn weight_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = etj(&["weight", "check", "--weight", "exp_power:0.5", "--out", out]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("admissibility.json").exists());
    assert_eq!(code(&etj(&["weight", "check", "--weight", "carleman:1", "--out", out])), 1);
    assert_eq!(code(&etj(&["weight", "check", "--weight", "spline:3", "--out", out])), 2);
    assert_eq!(code(&etj(&["weight", "frobnicate"])), 2);
}

#[test]
fn kernel_build_then_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let b = etj(&["kernel", "build", "--k", "1", "--points", "101", "--out", out]);
    assert_eq!(code(&b), 0, "{}", String::from_utf8_lossy(&b.stderr));
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,K"));
    assert_eq!(csv.lines().count(), 102);
    let i = etj(&["kernel", "inspect", out]);
    assert_eq!(code(&i), 0);
    assert!(String::from_utf8_lossy(&i.stdout).contains("c_hat"));
    assert_eq!(code(&etj(&["kernel", "inspect", "/nonexistent/kernel.json"])), 3);
}

#[test]
fn jackson_run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&quick_run(a.path(), "random-trig,sawtooth")), 0);
    assert_eq!(code(&quick_run(b.path(), "random-trig,sawtooth")), 0);
    for f in ["jackson.csv", "modulus.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let strip = |d: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("summary.json")).unwrap()).unwrap();
        v["config"]["out"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n_samples = 512\nr_grid = 1:8:4\ncorpus = sawtooth\nformat = json\n").unwrap();
    let out = dir.path().join("out");
    let o = etj(&[
        "jackson",
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("jackson.csv").exists());
    assert!(!out.join("jackson.json").exists());
    std::fs::write(&cfg, "n_samples = 512\nbackend = torus\n").unwrap();
    let bad = etj(&["jackson", "run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
}

#[test]
fn line_backend_rejects_small_scales() {
    let dir = tempfile::tempdir().unwrap();
    let o = etj(&[
        "jackson",
        "run",
        "--backend",
        "line",
        "--corpus",
        "bump",
        "--r-grid",
        "0.5:8:4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = etj(&[
        "jackson",
        "run",
        "--corpus",
        "abs-sin",
        "--m",
        "2",
        "--r-grid",
        "1:8:4",
        "--set",
        "n_samples=512",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("FAIL"));
}

#[test]
fn merge_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = tempfile::tempdir().unwrap();
    quick_run(a.path(), "sawtooth");
    quick_run(b.path(), "trig-poly");
    let o = etj(&[
        "report",
        "merge",
        a.path().to_str().unwrap(),
        b.path().to_str().unwrap(),
        "--out",
        m.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(m.path().join("jackson.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10);
}

#[test]
fn thread_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["weight", "check", "--weight", "poly:1:2", "--out", dir.path().to_str().unwrap()];
    assert_eq!(code(&etj_env(&args, &[("ETJ_THREADS", "1")])), 0);
    assert_eq!(code(&etj_env(&args, &[("ETJ_THREADS", "many")])), 2);
    assert_eq!(code(&etj_env(&args, &[("ETJ_THREADS", "0")])), 2);
}
