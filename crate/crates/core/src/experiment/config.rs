use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::{DEFAULT_DELTA, DEFAULT_N_PROD};
use crate::smoothness::DEFAULT_N_TAU;
use crate::space::corpus::{self, CorpusName};
use crate::space::NormIndex;
use crate::weight::{
    make_weight, CarlemanSequence, GroupBound, Weight, WeightKind, ZeroSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Periodic,
    Line,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "line" => Ok(Self::Line),
            _ => Err(format!("unknown backend {s:?} (periodic|line)")),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Periodic => "periodic",
            Self::Line => "line",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format {s:?} (csv|json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Geometric `r` grid `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RGrid {
    pub fn points(&self) -> Vec<f64> {
        crate::numeric::geometric_grid(self.min, self.max, self.count)
    }
}

impl FromStr for RGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected min:max:count, got {s:?}"));
        };
        let min: f64 = a.trim().parse().map_err(|_| format!("bad r_min {a:?}"))?;
        let max: f64 = b.trim().parse().map_err(|_| format!("bad r_max {b:?}"))?;
        let count: usize = c.trim().parse().map_err(|_| format!("bad count {c:?}"))?;
        if !(min > 0.0 && max >= min && max.is_finite()) || count == 0 || (count == 1 && max != min) {
            return Err(format!("invalid r grid {s:?}"));
        }
        Ok(Self { min, max, count })
    }
}

impl fmt::Display for RGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// Kernel weight selection.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelChoice {
    /// Product kernel for `alpha_from_group(M_U, k)`, one per `k` (and `k + m`).
    Auto,
    /// Product kernel for a fixed weight spec.
    Weight(String),
    /// Fejer kernel of order `m`.
    Fejer(u32),
}

impl FromStr for KernelChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        if let Some(m) = s.strip_prefix("fejer:") {
            return m
                .parse()
                .ok()
                .filter(|&m| (1..=10).contains(&m))
                .map(Self::Fejer)
                .ok_or_else(|| format!("bad Fejer order {m:?}"));
        }
        parse_weight(s).map_err(|e| e.to_string())?;
        Ok(Self::Weight(s.to_string()))
    }
}

fn num<T: FromStr>(s: Option<&str>, what: &str) -> Result<T> {
    s.and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| crate::error::invalid("weight", format!("missing or bad {what}")))
}

/// Parses a weight spec:
/// `constant`, `poly:M:k`, `exp_power:b`, `carleman:s`, `entire:C:c:e`
/// (zeros `c k^e`), `group:k` (`M_U = 1`) or `group:k:<spec>`.
pub fn parse_weight(spec: &str) -> Result<Weight> {
    let mut it = spec.trim().splitn(2, ':');
    let head = it.next().unwrap_or("");
    let rest = it.next();
    let args: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
    let kind = match head {
        "constant" => WeightKind::Constant,
        "poly" => WeightKind::Polynomial {
            scale: num(args.first().copied(), "scale")?,
            degree: num(args.get(1).copied(), "degree")?,
        },
        "exp_power" => WeightKind::ExpPower {
            exponent: num(args.first().copied(), "exponent")?,
        },
        "carleman" => WeightKind::Carleman {
            sequence: CarlemanSequence::FactorialPower {
                exponent: num(args.first().copied(), "exponent")?,
            },
        },
        "entire" => WeightKind::EntireProduct {
            scale: num(args.first().copied(), "scale")?,
            zeros: ZeroSequence::Power {
                scale: num(args.get(1).copied(), "zero scale")?,
                exponent: num(args.get(2).copied(), "zero exponent")?,
            },
        },
        "group" => {
            let rest = rest.unwrap_or("");
            let (k, inner) = match rest.split_once(':') {
                Some((k, inner)) => (k, Some(inner)),
                None => (rest, None),
            };
            let k: u32 = num(Some(k), "k")?;
            let base = match inner {
                None => GroupBound::Unit,
                Some(s) => GroupBound::Weight {
                    weight: Box::new(parse_weight(s)?),
                },
            };
            return crate::weight::alpha_from_group(base, k);
        }
        _ => return Err(crate::error::invalid("weight", format!("unknown weight spec {spec:?}"))),
    };
    make_weight(kind)
}

/// Everything `run_experiment` needs; built from defaults, a flat
/// `key = value` file and command-line overrides.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub backend: BackendKind,
    pub n_samples: usize,
    /// Line window half-width `T`.
    pub half_width: f64,
    /// Line weight `mu` spec.
    pub mu: String,
    pub p: NormIndex,
    pub kernel: KernelChoice,
    pub n_prod: usize,
    pub delta: f64,
    pub corpus: Vec<CorpusName>,
    pub seed: u64,
    pub k: Vec<usize>,
    pub m: Vec<usize>,
    pub r_grid: RGrid,
    pub out: PathBuf,
    pub format: Format,
    pub n_tau: usize,
    /// Adds `||x - x~||` and the chain check to every row.
    pub smoothing_check: bool,
    /// Derivative orders of the kernel certification.
    pub cert_n_max: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Periodic,
            n_samples: 4096,
            half_width: 16.0,
            mu: "exp_power:0.5".into(),
            p: NormIndex::TWO,
            kernel: KernelChoice::Auto,
            n_prod: DEFAULT_N_PROD,
            delta: DEFAULT_DELTA,
            corpus: vec![CorpusName::AbsSin],
            seed: 0,
            k: vec![1],
            m: Vec::new(),
            r_grid: RGrid {
                min: 1.0,
                max: 64.0,
                count: 13,
            },
            out: PathBuf::from("etj-out"),
            format: Format::Csv,
            n_tau: DEFAULT_N_TAU,
            smoothing_check: true,
            cert_n_max: 0,
        }
    }
}

fn list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad list item {s:?}")))
        .collect()
}

fn parse<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| e.to_string())
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 18] = [
        "backend",
        "n_samples",
        "half_width",
        "mu",
        "p",
        "kernel",
        "n_prod",
        "delta",
        "corpus",
        "seed",
        "k",
        "m",
        "r_grid",
        "out",
        "format",
        "n_tau",
        "smoothing_check",
        "cert_n_max",
    ];

    /// Sets one field from its textual value; `line` is reported on error
    /// (0 for command-line flags).
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let v = value.trim();
        let r: std::result::Result<(), String> = (|| {
            match key {
                "backend" => self.backend = v.parse()?,
                "n_samples" => self.n_samples = parse(v)?,
                "half_width" => self.half_width = parse(v)?,
                "mu" => {
                    parse_weight(v).map_err(|e| e.to_string())?;
                    self.mu = v.to_string();
                }
                "p" => self.p = parse(v)?,
                "kernel" => self.kernel = v.parse()?,
                "n_prod" => self.n_prod = parse(v)?,
                "delta" => self.delta = parse(v)?,
                "corpus" => self.corpus = corpus::parse_names(v).map_err(|e| e.to_string())?,
                "seed" => self.seed = parse(v)?,
                "k" => self.k = list(v)?,
                "m" => self.m = list(v)?,
                "r_grid" => self.r_grid = v.parse()?,
                "out" => self.out = PathBuf::from(v),
                "format" => self.format = v.parse()?,
                "n_tau" => self.n_tau = parse(v)?,
                "smoothing_check" => self.smoothing_check = parse_bool(v)?,
                "cert_n_max" => self.cert_n_max = parse(v)?,
                _ => return Err(format!("unknown key {key:?}")),
            }
            Ok(())
        })();
        r.map_err(|message| Error::Config {
            line,
            message: format!("{key}: {message}"),
        })
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key.trim(), value, i + 1)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(c)
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::Config { line: 0, message };
        if self.k.is_empty() || self.k.iter().any(|&k| k == 0 || k > crate::smoothness::MAX_ORDER) {
            return Err(bad("k: every order must lie in 1..=12".into()));
        }
        if self.m.iter().any(|&m| m > 4) {
            return Err(bad("m: derivative orders above 4 are not supported".into()));
        }
        if self.corpus.is_empty() {
            return Err(bad("corpus: empty".into()));
        }
        if self.r_grid.min < 1.0 && self.backend != BackendKind::Periodic {
            return Err(bad(format!(
                "r_grid: r_min = {} < 1 is only allowed on the periodic backend",
                self.r_grid.min
            )));
        }
        for c in &self.corpus {
            let ok = match self.backend {
                BackendKind::Periodic => c.is_periodic(),
                BackendKind::Line => c.is_line(),
            };
            if !ok {
                return Err(bad(format!("corpus: {c} is not available on the {} backend", self.backend)));
            }
        }
        if self.n_tau < 64 {
            return Err(bad("n_tau: must be at least 64".into()));
        }
        if self.cert_n_max > 12 {
            return Err(bad("cert_n_max: must be at most 12".into()));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(bad("half_width: must be positive".into()));
        }
        Ok(())
    }

    /// Canonical `key = value` listing, in [`Self::KEYS`] order.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let kernel = match &self.kernel {
            KernelChoice::Auto => "auto".to_string(),
            KernelChoice::Weight(s) => s.clone(),
            KernelChoice::Fejer(m) => format!("fejer:{m}"),
        };
        let values = [
            self.backend.to_string(),
            self.n_samples.to_string(),
            self.half_width.to_string(),
            self.mu.clone(),
            self.p.label(),
            kernel,
            self.n_prod.to_string(),
            self.delta.to_string(),
            self.corpus.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(","),
            self.seed.to_string(),
            join(&self.k),
            join(&self.m),
            self.r_grid.to_string(),
            self.out.display().to_string(),
            self.format.to_string(),
            self.n_tau.to_string(),
            self.smoothing_check.to_string(),
            self.cert_n_max.to_string(),
        ];
        Self::KEYS
            .iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
