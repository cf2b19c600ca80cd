//! Experiment configuration, batch runs and report files.

mod config;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

pub use config::{parse_weight, BackendKind, ExperimentConfig, Format, KernelChoice, RGrid};
pub use report::{
    fmt_f64, jackson_csv, kernel_csv, merge_reports, modulus_csv, report_summary, stable_json, stable_value,
    write_file, JACKSON_HEADER,
};

use crate::approximation::{jackson_check, jackson_derivative_check, JacksonOptions, JacksonReport, Smoother};
use crate::error::Result;
use crate::kernel::{build_kernel, fejer_kernel, Kernel, KernelSpec};
use crate::smoothness::modulus_report;
use crate::space::{corpus, GridFunction, LineGrid};
use crate::weight::{alpha_from_group, GroupBound};

/// Kernel for `choice`; `order` selects `alpha_from_group(M_U, order)` in
/// auto mode. Certified at `r = 1`.
pub fn kernel_for(config: &ExperimentConfig, order: usize) -> Result<Kernel> {
    let kernel = match &config.kernel {
        KernelChoice::Fejer(m) => fejer_kernel(*m)?,
        choice => {
            let weight = match choice {
                KernelChoice::Weight(spec) => parse_weight(spec)?,
                _ => {
                    let base = match config.backend {
                        BackendKind::Periodic => GroupBound::Unit,
                        BackendKind::Line => GroupBound::Weight {
                            weight: Box::new(parse_weight(&config.mu)?),
                        },
                    };
                    alpha_from_group(base, order as u32)?
                }
            };
            let mut spec = KernelSpec::new(weight);
            spec.n_prod = config.n_prod;
            spec.delta = config.delta;
            build_kernel(&spec)?
        }
    };
    kernel.certify(&[1.0], config.cert_n_max)
}

/// The corpus of `config`, in order, as `(name, x)`.
pub fn build_corpus(config: &ExperimentConfig) -> Result<Vec<(String, GridFunction)>> {
    let grid = match config.backend {
        BackendKind::Periodic => None,
        BackendKind::Line => Some(LineGrid::new(config.half_width, config.n_samples, parse_weight(&config.mu)?)?),
    };
    config
        .corpus
        .iter()
        .map(|&name| {
            let x = match &grid {
                None => corpus::periodic(name, config.n_samples, config.p, config.seed)?,
                Some(g) => corpus::line(name, Arc::clone(g), config.p)?,
            };
            Ok((name.as_str().to_string(), x))
        })
        .collect()
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub reports: Vec<JacksonReport>,
    /// One line per failed verdict or refused check.
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    config: BTreeMap<String, String>,
    kernels: BTreeMap<String, crate::kernel::KernelMetadata>,
    reports: Vec<serde_json::Value>,
    failures: &'a [String],
    verdict: &'static str,
}

fn kernel_order(config: &ExperimentConfig, order: usize) -> usize {
    match config.kernel {
        KernelChoice::Auto => order,
        _ => 0,
    }
}

/// Runs every `jackson_check` (and `jackson_derivative_check` per `m`) of
/// `config` and writes `jackson.csv` or `jackson.json`, `modulus.csv` and
/// `summary.json` into `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let xs = build_corpus(config)?;
    let r_grid = config.r_grid.points();
    let mut orders: Vec<usize> = Vec::new();
    for &k in &config.k {
        orders.push(kernel_order(config, k));
        for &m in &config.m {
            orders.push(kernel_order(config, k + m));
        }
    }
    orders.sort_unstable();
    orders.dedup();
    let kernels: BTreeMap<usize, Kernel> = orders
        .iter()
        .map(|&q| kernel_for(config, q.max(1)).map(|k| (q, k)))
        .collect::<Result<_>>()?;

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut moduli = Vec::new();
    for &k in &config.k {
        let kernel = &kernels[&kernel_order(config, k)];
        let smoother = Smoother::new(kernel, k);
        for (name, x) in &xs {
            let opts = JacksonOptions {
                n_tau: config.n_tau,
                with_smoothing: config.smoothing_check,
                method: None,
                x_ref: name.clone(),
            };
            match jackson_check(x, &r_grid, &smoother, &opts) {
                Ok(rep) => reports.push(rep),
                Err(e) => failures.push(format!("{name} k={k}: {e}")),
            }
            let ts: Vec<f64> = r_grid.iter().map(|r| 1.0 / r).collect();
            moduli.push(modulus_report(x, name, k, &ts, config.n_tau, false)?);
            for &m in &config.m {
                let dk = &kernels[&kernel_order(config, k + m)];
                let ds = Smoother::new(dk, k);
                let opts = JacksonOptions {
                    with_smoothing: false,
                    ..opts.clone()
                };
                match jackson_derivative_check(x, m, &r_grid, &ds, &opts) {
                    Ok(rep) => reports.push(rep),
                    Err(e) => failures.push(format!("{name} k={k} m={m}: {e}")),
                }
            }
        }
    }
    for rep in &reports {
        if !rep.verdict.passed() {
            let m = rep.m.map(|m| format!(" m={m}")).unwrap_or_default();
            failures.push(format!(
                "{} k={}{m}: {} (sup_ratio={}, constant_estimate={})",
                rep.x_ref,
                rep.k,
                rep.verdict.as_str(),
                fmt_f64(rep.sup_ratio),
                rep.constant_estimate.map(fmt_f64).unwrap_or_else(|| "none".into()),
            ));
        }
    }

    let out = &config.out;
    let mut files = Vec::new();
    match config.format {
        Format::Csv => files.push(write_file(&out.join("jackson.csv"), &jackson_csv(&reports))?),
        Format::Json => files.push(write_file(&out.join("jackson.json"), &stable_json(&reports)?)?),
    }
    files.push(write_file(&out.join("modulus.csv"), &modulus_csv(&moduli))?);
    let config_map = config
        .to_text()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let summary = Summary {
        config: config_map,
        kernels: kernels.iter().map(|(q, k)| (format!("order_{q}"), k.metadata())).collect(),
        reports: reports.iter().map(report_summary).collect::<Result<_>>()?,
        failures: &failures,
        verdict: if failures.is_empty() { "PASS" } else { "FAIL" },
    };
    files.push(write_file(&out.join("summary.json"), &stable_json(&summary)?)?);
    Ok(ExperimentOutcome {
        reports,
        failures,
        files,
    })
}
