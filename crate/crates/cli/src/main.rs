use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use etj_core::experiment::{
    kernel_csv, kernel_for, merge_reports, parse_weight, run_experiment, stable_json, write_file, ExperimentConfig,
    KernelChoice,
};
use etj_core::weight::{alpha_from_group, check_admissible, default_validation_grid, GroupBound, Verdict};
use etj_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "etj", version, about = "Exponential-type kernels, moduli of smoothness and Jackson checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect smoothing kernels.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Weight validation.
    #[command(subcommand)]
    Weight(WeightCommand),
    /// Jackson-inequality experiments.
    #[command(subcommand)]
    Jackson(JacksonCommand),
    /// Report post-processing.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Build and certify a kernel; writes kernel.csv and kernel.json.
    Build {
        #[command(flatten)]
        common: Common,
        /// Half-width of the tabulated range.
        #[arg(long, default_value_t = 32.0)]
        t_max: f64,
        /// Number of table points.
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Print the summary of a kernel.json (or of `<dir>/kernel.json`).
    Inspect { path: PathBuf },
}

#[derive(Subcommand)]
enum WeightCommand {
    /// Admissibility check; writes admissibility.json.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum JacksonCommand {
    /// Run the configured experiment suite.
    Run {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Merge run directories into one.
    Merge {
        /// Directories written by `jackson run`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "periodic|line")]
    backend: Option<String>,
    #[arg(long, value_name = "1|2|inf")]
    p: Option<String>,
    /// Comma-separated smoothness orders.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated derivative orders.
    #[arg(long)]
    m: Option<String>,
    #[arg(long, value_name = "min:max:count")]
    r_grid: Option<String>,
    /// Comma-separated corpus names.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
    /// Kernel weight spec (`auto`, `fejer:m`, `poly:M:k`, `group:k[:spec]`, ...).
    #[arg(long)]
    weight: Option<String>,
    /// Any other config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
                line: 0,
                message: format!("--set expects KEY=VALUE, got {kv:?}"),
            })?;
            c.set(k.trim(), v, 0)?;
        }
        let flags = [
            ("backend", self.backend.clone()),
            ("p", self.p.clone()),
            ("k", self.k.clone()),
            ("m", self.m.clone()),
            ("r_grid", self.r_grid.clone()),
            ("corpus", self.corpus.clone()),
            ("seed", self.seed.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("kernel", self.weight.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, &v, 0)?;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

enum Failure {
    Verdict(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Error(e)
    }
}

fn configure_threads() -> Result<(), Error> {
    match std::env::var("ETJ_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| Error::Config {
                line: 0,
                message: format!("ETJ_THREADS: expected a positive integer, got {v:?}"),
            })?;
            etj_core::par::configure_threads(n)
        }
        Err(_) => Ok(()),
    }
}

fn kernel_build(common: &Common, t_max: f64, points: usize) -> Result<(), Failure> {
    let c = common.config()?;
    let kernel = kernel_for(&c, c.k[0])?.certify(&[1.0, 2.0, 4.0], c.cert_n_max)?;
    let meta = kernel.metadata();
    write_file(&c.out.join("kernel.csv"), &kernel_csv(&kernel, t_max, points))?;
    write_file(&c.out.join("kernel.json"), &stable_json(&meta)?)?;
    println!(
        "kernel {} (alpha = {}): partial_sum_a = {:.6}, half_width = {}, written to {}",
        match &c.kernel {
            KernelChoice::Fejer(_) => "fejer",
            _ => "product",
        },
        meta.alpha,
        meta.partial_sum_a,
        meta.quad_half_width,
        c.out.display()
    );
    if meta.certification.iter().all(|r| r.certified) {
        Ok(())
    } else {
        Err(Failure::Verdict("certification produced non-finite constants".into()))
    }
}

fn kernel_inspect(path: &std::path::Path) -> Result<(), Failure> {
    let file = if path.is_dir() { path.join("kernel.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(Error::from)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let get = |k: &str| v.get(k).map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    for key in ["family", "alpha", "factors", "partial_sum_a", "l1_norm", "quad_half_width", "tail_bound", "peak"] {
        println!("{key:>16}: {}", get(key));
    }
    let mut certified = true;
    for rep in v.get("certification").and_then(|c| c.as_array()).into_iter().flatten() {
        let r = rep.get("r").map(|x| x.to_string()).unwrap_or_default();
        for row in rep.get("rows").and_then(|c| c.as_array()).into_iter().flatten() {
            println!(
                "    r = {r}, n = {}: c_hat = {}",
                row.get("n").map(|x| x.to_string()).unwrap_or_default(),
                row.get("c_hat").map(|x| x.to_string()).unwrap_or_default()
            );
        }
        certified &= rep.get("certified").and_then(|c| c.as_bool()).unwrap_or(false);
    }
    if certified {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("{}: kernel is not certified", file.display())))
    }
}

fn weight_check(common: &Common) -> Result<(), Failure> {
    let c = common.config()?;
    let w = match &c.kernel {
        KernelChoice::Weight(spec) => parse_weight(spec)?,
        KernelChoice::Fejer(m) => etj_core::weight::Weight::polynomial_bound(1.0, *m)?,
        KernelChoice::Auto => {
            let base = match c.backend {
                etj_core::experiment::BackendKind::Periodic => GroupBound::Unit,
                etj_core::experiment::BackendKind::Line => GroupBound::Weight {
                    weight: Box::new(parse_weight(&c.mu)?),
                },
            };
            alpha_from_group(base, c.k[0] as u32)?
        }
    };
    let report = check_admissible(&w, &default_validation_grid(), 1e-12);
    write_file(&c.out.join("admissibility.json"), &stable_json(&report)?)?;
    println!("{}: {:?}", report.weight, report.verdict);
    match report.verdict {
        Verdict::Admissible => Ok(()),
        v => Err(Failure::Verdict(format!("{}: {v:?}", report.weight))),
    }
}

fn jackson_run(common: &Common) -> Result<(), Failure> {
    let c = common.config()?;
    let outcome = run_experiment(&c)?;
    for rep in &outcome.reports {
        let m = rep.m.map(|m| format!(" m={m}")).unwrap_or_default();
        println!(
            "{:<12} k={}{m:<4} sup_ratio={:.6e} {}",
            rep.x_ref,
            rep.k,
            rep.sup_ratio,
            rep.verdict.as_str()
        );
    }
    if outcome.passed() {
        Ok(())
    } else {
        Err(Failure::Verdict(outcome.failures.join("\n")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match &cli.command {
        Command::Kernel(KernelCommand::Build { common, t_max, points }) => kernel_build(common, *t_max, *points),
        Command::Kernel(KernelCommand::Inspect { path }) => kernel_inspect(path),
        Command::Weight(WeightCommand::Check { common }) => weight_check(common),
        Command::Jackson(JacksonCommand::Run { common }) => jackson_run(common),
        Command::Report(ReportCommand::Merge { inputs, out }) => merge_reports(inputs, out)
            .map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
            })
            .map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(msg)) => {
            eprintln!("FAIL\n{msg}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::InvalidParameter { .. } => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_RUNTIME),
            }
        }
    }
}
