//! Named test functions.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GridFunction, LineGrid, NormIndex};
use crate::error::{invalid, Error, Result};

/// Terms in the sawtooth partial sum `sum_{j<=J} sin(j xi) / j`.
pub const SAWTOOTH_TERMS: i64 = 512;
/// Highest frequency of the random trigonometric series.
pub const RANDOM_TRIG_DEGREE: i64 = 1024;
/// Decay exponent of the random series, `|c_n| ~ n^-4`.
pub const RANDOM_TRIG_DECAY: f64 = 4.0;
const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_OCTAVES: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CorpusName {
    Constant,
    Sawtooth,
    AbsSin,
    Weierstrass,
    RandomTrig,
    TrigPoly,
    Bump,
    Gaussian,
}

impl CorpusName {
    pub const PERIODIC: [CorpusName; 6] = [
        Self::Constant,
        Self::Sawtooth,
        Self::AbsSin,
        Self::Weierstrass,
        Self::RandomTrig,
        Self::TrigPoly,
    ];
    pub const LINE: [CorpusName; 3] = [Self::Constant, Self::Bump, Self::Gaussian];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Sawtooth => "sawtooth",
            Self::AbsSin => "abs-sin",
            Self::Weierstrass => "weierstrass",
            Self::RandomTrig => "random-trig",
            Self::TrigPoly => "trig-poly",
            Self::Bump => "bump",
            Self::Gaussian => "gaussian",
        }
    }

    pub fn is_periodic(self) -> bool {
        Self::PERIODIC.contains(&self)
    }

    pub fn is_line(self) -> bool {
        Self::LINE.contains(&self)
    }
}

impl std::str::FromStr for CorpusName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "constant" => Self::Constant,
            "sawtooth" => Self::Sawtooth,
            "abs-sin" => Self::AbsSin,
            "weierstrass" => Self::Weierstrass,
            "random-trig" => Self::RandomTrig,
            "trig-poly" => Self::TrigPoly,
            "bump" => Self::Bump,
            "gaussian" => Self::Gaussian,
            other => return Err(invalid("corpus", format!("unknown corpus name {other:?}"))),
        })
    }
}

impl std::fmt::Display for CorpusName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parses a comma-separated list of corpus names.
pub fn parse_names(list: &str) -> Result<Vec<CorpusName>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients `(n, c_n)` of the random series with `|c_{+-n}| = n^-4 / 2`
/// and phases drawn from `seed`.
pub fn random_trig_coefficients(seed: u64) -> Vec<(i64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * RANDOM_TRIG_DEGREE as usize);
    for n in 1..=RANDOM_TRIG_DEGREE {
        let phase: f64 = rng.random_range(0.0..2.0 * PI);
        let amp = 0.5 * (n as f64).powf(-RANDOM_TRIG_DECAY);
        let z = Complex64::from_polar(amp, phase);
        out.push((n, z));
        out.push((-n, z.conj()));
    }
    out
}

/// A periodic corpus element on `n` samples.
pub fn periodic(name: CorpusName, n: usize, p: NormIndex, seed: u64) -> Result<GridFunction> {
    match name {
        CorpusName::Constant => GridFunction::periodic_from_fn(n, p, |_| 1.0),
        CorpusName::AbsSin => GridFunction::periodic_from_fn(n, p, |x| x.sin().abs()),
        CorpusName::Sawtooth => {
            let terms = SAWTOOTH_TERMS.min(n as i64 / 2 - 1);
            let coeffs: Vec<(i64, Complex64)> = (1..=terms)
                .flat_map(|j| {
                    // sin(j x) / j = (e^{ijx} - e^{-ijx}) / (2 i j)
                    let a = 0.5 / j as f64;
                    [(j, c(0.0, -a)), (-j, c(0.0, a))]
                })
                .collect();
            GridFunction::periodic_from_coefficients(n, p, &coeffs)
        }
        CorpusName::Weierstrass => {
            let coeffs: Vec<(i64, Complex64)> = (0..=WEIERSTRASS_OCTAVES)
                .map(|j| (1i64 << j, 0.5 * 2f64.powf(-WEIERSTRASS_A * j as f64)))
                .filter(|(f, _)| (*f as usize) < n / 2)
                .flat_map(|(f, a)| [(f, c(a, 0.0)), (-f, c(a, 0.0))])
                .collect();
            GridFunction::periodic_from_coefficients(n, p, &coeffs)
        }
        CorpusName::RandomTrig => {
            let coeffs: Vec<(i64, Complex64)> = random_trig_coefficients(seed)
                .into_iter()
                .filter(|(m, _)| (m.unsigned_abs() as usize) < n / 2)
                .collect();
            GridFunction::periodic_from_coefficients(n, p, &coeffs)
        }
        CorpusName::TrigPoly => GridFunction::periodic_from_fn(n, p, |x| {
            0.3 * x.cos() + 0.5 * (2.0 * x).sin() + (5.0 * x).cos()
        }),
        CorpusName::Bump | CorpusName::Gaussian => Err(Error::BackendMismatch(format!(
            "corpus element {name} lives on the line backend"
        ))),
    }
}

/// Smooth bump supported on `[0, 1]` with peak 1 at `1/2`.
pub fn unit_bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * s - 1.0;
    (1.0 - 1.0 / (1.0 - u * u)).exp()
}

/// A line corpus element on `grid`.
pub fn line(name: CorpusName, grid: Arc<LineGrid>, p: NormIndex) -> Result<GridFunction> {
    match name {
        CorpusName::Bump => GridFunction::line_from_fn(grid, p, unit_bump),
        CorpusName::Gaussian => GridFunction::line_from_fn(grid, p, |s| (-s * s).exp()),
        CorpusName::Constant => GridFunction::line_from_fn(grid, p, |_| 0.0),
        _ => Err(Error::BackendMismatch(format!(
            "corpus element {name} lives on the periodic backend"
        ))),
    }
}

/// Reads one numeric column from a CSV file. `column` is a header name or a
/// zero-based index; a non-numeric first row is treated as a header.
pub fn load_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let first: Vec<&str> = match lines.peek() {
        Some(l) => l.split(',').map(str::trim).collect(),
        None => return Err(Error::Empty("csv")),
    };
    let has_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let index = match column.parse::<usize>() {
        Ok(i) => i,
        Err(_) if has_header => first
            .iter()
            .position(|f| *f == column)
            .ok_or_else(|| invalid("column", format!("no column named {column:?}")))?,
        Err(_) => return Err(invalid("column", "named column needs a header row")),
    };
    if has_header {
        lines.next();
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let field = l.split(',').nth(index).map(str::trim).unwrap_or("");
            field.parse::<f64>().map_err(|_| Error::Config {
                line: i + 1 + has_header as usize,
                message: format!("cannot parse {field:?} as a number"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Weight;

    #[test]
    fn names_round_trip() {
        for n in CorpusName::PERIODIC.iter().chain(&CorpusName::LINE) {
            assert_eq!(n.as_str().parse::<CorpusName>().unwrap(), *n);
        }
        assert!(parse_names("sawtooth,nope").is_err());
        assert_eq!(parse_names("abs-sin, weierstrass").unwrap().len(), 2);
    }

    #[test]
    fn sawtooth_matches_direct_sum() {
        let x = periodic(CorpusName::Sawtooth, 4096, NormIndex::TWO, 0).unwrap();
        let xi = 2.0 * PI * 100.0 / 4096.0;
        let direct: f64 = (1..=SAWTOOTH_TERMS).map(|j| (j as f64 * xi).sin() / j as f64).sum();
        assert!((x.values()[100].re - direct).abs() < 1e-12);
        assert!(x.values().iter().all(|v| v.im.abs() < 1e-13));
    }

    #[test]
    fn random_trig_is_seeded_and_real() {
        let a = periodic(CorpusName::RandomTrig, 4096, NormIndex::TWO, 7).unwrap();
        let b = periodic(CorpusName::RandomTrig, 4096, NormIndex::TWO, 7).unwrap();
        let d = periodic(CorpusName::RandomTrig, 4096, NormIndex::TWO, 8).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), d.values());
        assert!(a.values().iter().all(|v| v.im.abs() < 1e-14));
        assert_eq!(a.trig_degree(1e-15).unwrap(), Some(RANDOM_TRIG_DEGREE as usize));
    }

    #[test]
    fn bump_and_backend_checks() {
        let grid = LineGrid::new(8.0, 4097, Weight::constant()).unwrap();
        let b = line(CorpusName::Bump, grid.clone(), NormIndex::ONE).unwrap();
        assert!(b.norm() > 0.0);
        assert!(line(CorpusName::Sawtooth, grid, NormIndex::ONE).is_err());
        assert!(periodic(CorpusName::Bump, 64, NormIndex::TWO, 0).is_err());
    }

    #[test]
    fn csv_column_loading() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "t,x\n0,1.5\n1,2.5\n").unwrap();
        assert_eq!(load_csv_column(&p, "x").unwrap(), vec![1.5, 2.5]);
        assert_eq!(load_csv_column(&p, "0").unwrap(), vec![0.0, 1.0]);
        std::fs::write(&p, "1\n2\nfoo\n").unwrap();
        assert!(matches!(load_csv_column(&p, "0"), Err(Error::Config { line: 3, .. })));
    }
}
