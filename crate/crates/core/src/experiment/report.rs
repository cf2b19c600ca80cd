use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::approximation::JacksonReport;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::smoothness::ModulusReport;

/// 17 significant digits in scientific notation with a signed exponent;
/// `inf`, `-inf`, `nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    }
}

fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => Value::Number(Number::from_str(&fmt_f64(x)).unwrap_or(n)),
                    _ => Value::Null,
                }
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

/// `value` as a JSON tree with sorted keys and every float in [`fmt_f64`]
/// form (non-finite floats become `null`).
pub fn stable_value<T: Serialize + ?Sized>(value: &T) -> Result<Value> {
    Ok(canonical(serde_json::to_value(value)?))
}

/// Pretty-printed [`stable_value`] with a trailing newline.
pub fn stable_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&stable_value(value)?)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(path.to_path_buf())
}

pub const JACKSON_HEADER: &str = "corpus,backend,p,k,m,r,E_r,method,modulus,ratio,bound,slack,smoothing_error,chain_ok,norm_reference,degenerate,refinement_flag";

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV line per row of every report, under [`JACKSON_HEADER`].
pub fn jackson_csv(reports: &[JacksonReport]) -> String {
    let mut s = String::new();
    s.push_str(JACKSON_HEADER);
    s.push('\n');
    for rep in reports {
        for row in &rep.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                rep.x_ref,
                rep.backend,
                rep.p,
                rep.k,
                opt(rep.m),
                fmt_f64(row.r),
                fmt_f64(row.e_r),
                row.method,
                fmt_f64(row.modulus),
                fmt_f64(row.ratio),
                opt_f64(row.bound),
                fmt_f64(row.slack),
                opt_f64(row.smoothing_error),
                opt(row.chain_ok),
                opt_f64(row.norm_reference),
                row.degenerate,
                row.refinement_flag,
            );
        }
    }
    s
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    x_ref: &'a str,
    backend: &'a str,
    p: &'a str,
    k: usize,
    m: Option<usize>,
    rows: usize,
    sup_ratio: f64,
    constant_estimate: Option<f64>,
    verdict: &'a str,
    derivative: &'a Option<crate::approximation::DerivativeSummary>,
}

/// Per-report summary (no rows) as a stable JSON tree.
pub fn report_summary(rep: &JacksonReport) -> Result<Value> {
    stable_value(&ReportSummary {
        x_ref: &rep.x_ref,
        backend: &rep.backend,
        p: &rep.p,
        k: rep.k,
        m: rep.m,
        rows: rep.rows.len(),
        sup_ratio: rep.sup_ratio,
        constant_estimate: rep.constant_estimate,
        verdict: rep.verdict.as_str(),
        derivative: &rep.derivative,
    })
}

/// `t,omega_tilde` lines for each modulus report, prefixed by corpus and `k`.
pub fn modulus_csv(reports: &[ModulusReport]) -> String {
    let mut s = String::from("corpus,k,t,omega_tilde\n");
    for rep in reports {
        for (t, v) in rep.t_grid.iter().zip(&rep.values) {
            let _ = writeln!(s, "{},{},{},{}", rep.x_ref, rep.k, fmt_f64(*t), fmt_f64(*v));
        }
    }
    s
}

/// `t,K` table on `[-t_max, t_max]`.
pub fn kernel_csv(kernel: &Kernel, t_max: f64, count: usize) -> String {
    let mut s = String::from("t,K\n");
    for (t, v) in kernel.table(t_max, count) {
        let _ = writeln!(s, "{},{}", fmt_f64(t), fmt_f64(v));
    }
    s
}

/// Concatenates the run directories `inputs` into `out`: `jackson.csv` rows
/// in input order and `summary.json` with the reports and failures joined
/// and the overall verdict recomputed.
pub fn merge_reports(inputs: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    if inputs.is_empty() {
        return Err(Error::Empty("inputs"));
    }
    let mut csv = String::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut sources = Vec::new();
    for dir in inputs {
        let text = std::fs::read_to_string(dir.join("summary.json"))?;
        let v: Value = serde_json::from_str(&text)?;
        let field = |name: &str| -> Result<Vec<Value>> {
            v.get(name)
                .and_then(Value::as_array)
                .cloned()
                .ok_or_else(|| Error::Config {
                    line: 0,
                    message: format!("{}: summary.json lacks {name:?}", dir.display()),
                })
        };
        reports.extend(field("reports")?);
        failures.extend(field("failures")?);
        sources.push(Value::String(dir.display().to_string()));
        let rows = dir.join("jackson.csv");
        if rows.exists() {
            let text = std::fs::read_to_string(&rows)?;
            let mut lines = text.lines();
            match lines.next() {
                Some(h) if h == JACKSON_HEADER => {}
                _ => {
                    return Err(Error::Config {
                        line: 1,
                        message: format!("{}: unexpected header", rows.display()),
                    })
                }
            }
            if csv.is_empty() {
                csv.push_str(JACKSON_HEADER);
                csv.push('\n');
            }
            for l in lines {
                csv.push_str(l);
                csv.push('\n');
            }
        }
    }
    let passed = failures.is_empty()
        && reports
            .iter()
            .all(|r| r.get("verdict").and_then(Value::as_str).is_some_and(|v| v.starts_with("PASS")));
    let mut summary = serde_json::Map::new();
    summary.insert("sources".into(), Value::Array(sources));
    summary.insert("reports".into(), Value::Array(reports));
    summary.insert("failures".into(), Value::Array(failures));
    summary.insert("verdict".into(), Value::String(if passed { "PASS" } else { "FAIL" }.into()));
    let mut files = vec![write_file(&out.join("summary.json"), &stable_json(&Value::Object(summary))?)?];
    if !csv.is_empty() {
        files.push(write_file(&out.join("jackson.csv"), &csv)?);
    }
    Ok(files)
}
