//! Admissible weights: even, at least one, submultiplicative functions with a
//! convergent logarithmic integral, plus the concrete families used to build
//! kernels and weighted spaces.
//!
//! Every weight is evaluated in the log domain first; [`Weight::value`]
//! exponentiates on demand and [`eval_weight`] reports overflow explicitly.

mod admissibility;

pub use admissibility::{
    carleman_report, check_admissible, AdmissibilityReport, CarlemanReport, Convergence,
    LogWeight, SeriesEstimate, Verdict,
};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numeric::{ln_factorial, log_add_exp};

/// Log-convex sequence `m_n` defining a power-series weight `sum |t|^n / m_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CarlemanSequence {
    /// Explicit `m_0, m_1, ..., m_L`; the weight is the truncated series.
    Explicit { values: Vec<f64> },
    /// `m_n = (n!)^s`.
    FactorialPower { exponent: f64 },
}

impl CarlemanSequence {
    /// `ln m_n`, or `None` past the end of an explicit sequence.
    pub fn ln_term(&self, n: usize) -> Option<f64> {
        match self {
            Self::Explicit { values } => values.get(n).map(|v| v.ln()),
            Self::FactorialPower { exponent } => Some(exponent * ln_factorial(n)),
        }
    }

    pub fn len_hint(&self) -> Option<usize> {
        match self {
            Self::Explicit { values } => Some(values.len()),
            Self::FactorialPower { .. } => None,
        }
    }
}

/// Positive nondecreasing zeros `t_k` of the entire-product weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ZeroSequence {
    Explicit { values: Vec<f64> },
    /// `t_k = scale * k^exponent`, `k >= 1`.
    Power { scale: f64, exponent: f64 },
}

/// Nondecreasing table of `M_U` samples, interpolated linearly and held
/// constant past the last knot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    t: Vec<f64>,
    values: Vec<f64>,
}

impl BoundTable {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != values.len() {
            return Err(invalid("table", "knots and values must be nonempty and equally long"));
        }
        if t[0] != 0.0 {
            return Err(invalid("table", "first knot must be t = 0"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("table", "knots must be strictly increasing"));
        }
        Ok(Self { t, values })
    }

    fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.t.partition_point(|&k| k <= t) {
            0 => self.values[0],
            i if i >= self.t.len() => *self.values.last().unwrap(),
            i => {
                let (t0, t1) = (self.t[i - 1], self.t[i]);
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluator for the local group-norm bound `M_U(t) = sup_{|s|<=t} ||U(s)||`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupBound {
    /// `M_U = 1` (isometric group).
    Unit,
    /// `M_U(t) = w(|t|)`.
    Weight { weight: Box<Weight> },
    Table { table: BoundTable },
}

impl GroupBound {
    pub fn ln_value(&self, t: f64) -> f64 {
        match self {
            Self::Unit => 0.0,
            Self::Weight { weight } => weight.ln_value(t),
            Self::Table { table } => table.eval(t).ln(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.ln_value(t).exp()
    }

    /// `(lower, upper)` bounds on `sum_{j>n} ln M_U(j) / j^2`.
    fn log_tail_bounds(&self, n: usize) -> (f64, f64) {
        match self {
            Self::Unit => (0.0, 0.0),
            Self::Weight { weight } => weight.log_tail_bounds(n),
            Self::Table { table } => (0.0, table.max().ln().max(0.0) / n as f64),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Unit | Self::Table { .. } => true,
            Self::Weight { weight } => matches!(weight.kind(), WeightKind::Constant),
        }
    }
}

/// Weight family with parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `1`.
    Constant,
    /// `M (1 + |t|)^k`.
    Polynomial { scale: f64, degree: u32 },
    /// `exp(|t|^b)`, `0 < b < 1`.
    ExpPower { exponent: f64 },
    /// `sum_n |t|^n / m_n`.
    Carleman { sequence: CarlemanSequence },
    /// `C prod_k |1 - t / (i t_k)|`.
    EntireProduct { scale: f64, zeros: ZeroSequence },
    /// `M_U(|t|)^k (1 + |t|)^(k+2)`.
    GroupComposed { base: GroupBound, k: u32 },
}

/// An admissible weight. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    #[serde(flatten)]
    kind: WeightKind,
}

/// Result of [`eval_weight`]: a finite value, or the logarithm when the value
/// itself overflows `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightValue {
    Finite(f64),
    LogOnly(f64),
}

impl WeightValue {
    pub fn ln(self) -> f64 {
        match self {
            Self::Finite(v) => v.ln(),
            Self::LogOnly(l) => l,
        }
    }
}

/// Evaluates `w(t)`, falling back to the log-domain channel on overflow.
pub fn eval_weight(w: &Weight, t: f64) -> WeightValue {
    let l = w.ln_value(t);
    let v = l.exp();
    if v.is_finite() {
        WeightValue::Finite(v)
    } else {
        WeightValue::LogOnly(l)
    }
}

/// Builds and validates a weight of the given kind.
pub fn make_weight(kind: WeightKind) -> Result<Weight> {
    validate_parameters(&kind)?;
    let w = Weight { kind };
    w.validate_on_grid(&default_validation_grid())?;
    Ok(w)
}

/// Builds `alpha(t) = M_U(|t|)^k (1 + |t|)^(k+2)` for a group with bound `base`.
pub fn alpha_from_group(base: GroupBound, k: u32) -> Result<Weight> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    let grid = default_validation_grid();
    let mut prev = f64::NEG_INFINITY;
    for &t in grid.iter().filter(|t| **t >= 0.0) {
        let v = base.value(t);
        if v < 1.0 - 1e-12 {
            return Err(Error::WeightInvariant {
                property: "M_U >= 1",
                t,
            });
        }
        if v < prev * (1.0 - 1e-12) {
            return Err(Error::WeightInvariant {
                property: "M_U nondecreasing",
                t,
            });
        }
        prev = v;
    }
    make_weight(WeightKind::GroupComposed { base, k })
}

/// `int ((1 + |t|) M_U(|t|))^k / alpha(t) dt` for `alpha = alpha_from_group(base, k)`;
/// equals 2 by construction.
pub fn group_alpha_integral(alpha: &Weight) -> Result<f64> {
    let WeightKind::GroupComposed { base, k } = alpha.kind() else {
        return Err(invalid("alpha", "not a group-composed weight"));
    };
    let k = *k as f64;
    let f = |t: f64| (k * (t.ln_1p() + base.ln_value(t)) - alpha.ln_value(t)).exp();
    let half = crate::quadrature::integrate_to_infinity(f, 0.0, Default::default())?;
    Ok(2.0 * half.value)
}

/// Symmetric grid on `[-64, 64]` with step 1/4.
pub fn default_validation_grid() -> Vec<f64> {
    (-256..=256).map(|i| i as f64 * 0.25).collect()
}

fn validate_parameters(kind: &WeightKind) -> Result<()> {
    match kind {
        WeightKind::Constant => Ok(()),
        WeightKind::Polynomial { scale, .. } => {
            if !(scale.is_finite() && *scale >= 1.0) {
                return Err(invalid("M", format!("must be finite and >= 1, got {scale}")));
            }
            Ok(())
        }
        WeightKind::ExpPower { exponent } => {
            if !(*exponent > 0.0 && *exponent < 1.0) {
                return Err(invalid("beta", format!("must lie in (0, 1), got {exponent}")));
            }
            Ok(())
        }
        WeightKind::Carleman { sequence } => validate_carleman(sequence),
        WeightKind::EntireProduct { scale, zeros } => {
            if !(scale.is_finite() && *scale >= 1.0) {
                return Err(invalid("C", format!("must be finite and >= 1, got {scale}")));
            }
            validate_zeros(zeros)
        }
        WeightKind::GroupComposed { k, .. } => {
            if *k == 0 {
                return Err(invalid("k", "must be at least 1"));
            }
            Ok(())
        }
    }
}

/// Checks `m_0 = 1`, positivity, log-convexity and the factorial
/// submultiplicativity condition for an explicit sequence.
pub(crate) fn validate_carleman(seq: &CarlemanSequence) -> Result<()> {
    match seq {
        CarlemanSequence::FactorialPower { exponent } => {
            if !(exponent.is_finite() && *exponent >= 1.0) {
                return Err(invalid("s", format!("(n!)^s needs s >= 1, got {exponent}")));
            }
            Ok(())
        }
        CarlemanSequence::Explicit { values } => {
            if values.len() < 2 {
                return Err(invalid("m_seq", "needs at least m_0 and m_1"));
            }
            if (values[0] - 1.0).abs() > 1e-12 {
                return Err(invalid("m_seq", format!("m_0 must be 1, got {}", values[0])));
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(invalid("m_seq", "entries must be finite and positive"));
            }
            check_log_convex(values)?;
            let ln_m: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            let len = values.len();
            for k in 1..len {
                for l in 1..len - k {
                    let lhs = ln_factorial(k + l) - ln_m[k + l];
                    let rhs = ln_factorial(k) - ln_m[k] + ln_factorial(l) - ln_m[l];
                    if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                        return Err(Error::NotFactorialSubmultiplicative { k, l });
                    }
                }
            }
            Ok(())
        }
    }
}

pub(crate) fn check_log_convex(values: &[f64]) -> Result<()> {
    for n in 1..values.len().saturating_sub(1) {
        let lhs = 2.0 * values[n].ln();
        let rhs = values[n - 1].ln() + values[n + 1].ln();
        if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
            return Err(Error::NotLogConvex { index: n });
        }
    }
    Ok(())
}

fn validate_zeros(zeros: &ZeroSequence) -> Result<()> {
    match zeros {
        ZeroSequence::Power { scale, exponent } => {
            if !(scale.is_finite() && *scale > 0.0) {
                return Err(invalid("t_seq", "scale must be positive"));
            }
            if !(exponent.is_finite() && *exponent > 1.0) {
                return Err(Error::DivergentProduct(format!(
                    "t_k = c k^q with q = {exponent} <= 1"
                )));
            }
            Ok(())
        }
        ZeroSequence::Explicit { values } => {
            if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(invalid("t_seq", "entries must be finite and positive"));
            }
            if values.windows(2).any(|w| w[1] < w[0]) {
                return Err(invalid("t_seq", "must be nondecreasing"));
            }
            // Power-law fit over the second half estimates the growth order of t_k.
            if values.len() >= 8 {
                let half = values.len() / 2;
                let xs: Vec<f64> = (half..values.len()).map(|i| ((i + 1) as f64).ln()).collect();
                let ys: Vec<f64> = values[half..].iter().map(|v| v.ln()).collect();
                if let Some(q) = crate::numeric::ls_slope(&xs, &ys) {
                    if q <= 1.0 {
                        return Err(Error::DivergentProduct(format!(
                            "tail of t_k grows like k^{q:.3}"
                        )));
                    }
                }
            }
            Ok(())
        }
    }
}

/// `sum_{j>n} ln(1+j)/j^2 <= ln(1+n)/n + ln((n+1)/n)`.
fn poly_unit_tail(n: usize) -> f64 {
    let n = n as f64;
    (1.0 + n).ln() / n + ((n + 1.0) / n).ln()
}

impl Weight {
    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Convenience: the constant weight.
    pub fn constant() -> Self {
        Self {
            kind: WeightKind::Constant,
        }
    }

    /// `M (1 + |t|)^(2m)`, the polynomial bound form used with the Fejer kernel.
    pub fn polynomial_bound(scale: f64, m: u32) -> Result<Self> {
        make_weight(WeightKind::Polynomial {
            scale,
            degree: 2 * m,
        })
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant => "constant".into(),
            WeightKind::Polynomial { scale, degree } => format!("polynomial(M={scale},k={degree})"),
            WeightKind::ExpPower { exponent } => format!("exp_power(beta={exponent})"),
            WeightKind::Carleman { sequence } => match sequence {
                CarlemanSequence::Explicit { values } => format!("carleman(explicit,len={})", values.len()),
                CarlemanSequence::FactorialPower { exponent } => format!("carleman((n!)^{exponent})"),
            },
            WeightKind::EntireProduct { scale, zeros } => match zeros {
                ZeroSequence::Explicit { values } => {
                    format!("entire_product(C={scale},explicit,len={})", values.len())
                }
                ZeroSequence::Power { scale: c, exponent } => {
                    format!("entire_product(C={scale},t_k={c}k^{exponent})")
                }
            },
            WeightKind::GroupComposed { base, k } => {
                let b = match base {
                    GroupBound::Unit => "1".to_string(),
                    GroupBound::Weight { weight } => weight.label(),
                    GroupBound::Table { .. } => "table".to_string(),
                };
                format!("group_composed(M_U={b},k={k})")
            }
        }
    }

    /// `ln w(t)`; always finite for finite `t`.
    pub fn ln_value(&self, t: f64) -> f64 {
        let a = t.abs();
        match &self.kind {
            WeightKind::Constant => 0.0,
            WeightKind::Polynomial { scale, degree } => scale.ln() + *degree as f64 * a.ln_1p(),
            WeightKind::ExpPower { exponent } => a.powf(*exponent),
            WeightKind::Carleman { sequence } => ln_carleman(sequence, a),
            WeightKind::EntireProduct { scale, zeros } => scale.ln() + ln_entire_product(zeros, a),
            WeightKind::GroupComposed { base, k } => {
                let k = *k as f64;
                k * base.ln_value(a) + (k + 2.0) * a.ln_1p()
            }
        }
    }

    /// `w(t)`; may be `inf` for super-polynomial weights at very large `|t|`.
    pub fn value(&self, t: f64) -> f64 {
        self.ln_value(t).exp()
    }

    /// Lower and upper bounds on `sum_{j>n} ln w(j) / j^2` (either may be
    /// infinite). The upper bound is an integral-test estimate on a
    /// decreasing majorant of `ln w(u) / u^2`.
    pub fn log_tail_bounds(&self, n: usize) -> (f64, f64) {
        let n = n.max(1);
        let nf = n as f64;
        match &self.kind {
            WeightKind::Constant => (0.0, 0.0),
            WeightKind::Polynomial { scale, degree } => {
                (0.0, scale.ln() / nf + *degree as f64 * poly_unit_tail(n))
            }
            WeightKind::ExpPower { exponent } => (0.0, nf.powf(exponent - 1.0) / (1.0 - exponent)),
            WeightKind::Carleman { sequence } => match sequence {
                CarlemanSequence::FactorialPower { exponent } => {
                    if *exponent <= 1.0 {
                        (f64::INFINITY, f64::INFINITY)
                    } else {
                        let s = *exponent;
                        (0.0, s * nf.powf(1.0 / s - 1.0) / (1.0 - 1.0 / s))
                    }
                }
                CarlemanSequence::Explicit { values } => {
                    let lead: f64 = values.iter().map(|v| 1.0 / v).sum::<f64>().ln().max(0.0);
                    let degree = (values.len() - 1) as f64;
                    (0.0, lead / nf + degree * poly_unit_tail(n))
                }
            },
            WeightKind::EntireProduct { scale, zeros } => match zeros {
                ZeroSequence::Power { scale: c, exponent: q } => {
                    let a = 1.0 / q;
                    let b = std::f64::consts::PI / (std::f64::consts::PI * a).sin();
                    (0.0, scale.ln() / nf + b * c.powf(-a) * nf.powf(a - 1.0) / (1.0 - a))
                }
                ZeroSequence::Explicit { values } => {
                    let len = values.len() as f64;
                    let tmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
                    let lead = scale.ln() + len * (1.0 / tmin).ln().max(0.0);
                    (0.0, lead / nf + len * poly_unit_tail(n))
                }
            },
            WeightKind::GroupComposed { base, k } => {
                let (lo, hi) = base.log_tail_bounds(n);
                let k = *k as f64;
                (k * lo, k * hi + (k + 2.0) * poly_unit_tail(n))
            }
        }
    }

    /// Sample-tests the class invariants: `w >= 1`, evenness, monotonicity on
    /// `t >= 0`, and submultiplicativity on grid pairs (relative tol 1e-12).
    pub fn validate_on_grid(&self, grid: &[f64]) -> Result<()> {
        let mut pos: Vec<f64> = grid.iter().map(|t| t.abs()).collect();
        pos.sort_by(f64::total_cmp);
        pos.dedup();
        let mut prev = f64::NEG_INFINITY;
        for &t in &pos {
            let l = self.ln_value(t);
            if !(l >= -1e-12) {
                return Err(Error::WeightInvariant { property: "w >= 1", t });
            }
            if l < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::WeightInvariant {
                    property: "monotone on t >= 0",
                    t,
                });
            }
            prev = l;
        }
        let coarse: Vec<f64> = pos.iter().step_by((pos.len() / 64).max(1)).cloned().collect();
        for &a in &coarse {
            for &b in &coarse {
                for (x, y) in [(a, b), (a, -b)] {
                    let lhs = self.ln_value(x + y);
                    let rhs = self.ln_value(x) + self.ln_value(y);
                    if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                        return Err(Error::WeightInvariant {
                            property: "submultiplicativity",
                            t: x + y,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn ln_carleman(seq: &CarlemanSequence, a: f64) -> f64 {
    if a == 0.0 {
        return -seq.ln_term(0).unwrap_or(0.0);
    }
    let la = a.ln();
    match seq {
        CarlemanSequence::Explicit { values } => values
            .iter()
            .enumerate()
            .map(|(n, m)| n as f64 * la - m.ln())
            .fold(f64::NEG_INFINITY, log_add_exp),
        CarlemanSequence::FactorialPower { exponent } => {
            let s = *exponent;
            let peak = a.powf(1.0 / s);
            let mut acc = f64::NEG_INFINITY;
            let mut best = f64::NEG_INFINITY;
            let mut n = 0usize;
            loop {
                let term = n as f64 * la - s * ln_factorial(n);
                acc = log_add_exp(acc, term);
                best = best.max(term);
                if (n as f64) > peak && term < best - 45.0 {
                    break;
                }
                n += 1;
                if n > 50_000_000 {
                    break;
                }
            }
            acc
        }
    }
}

/// `sum_k ln|1 + i t/t_k|` with the small-factor tail summed analytically.
fn ln_entire_product(zeros: &ZeroSequence, a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    match zeros {
        ZeroSequence::Explicit { values } => {
            let mut s = 0.0;
            for &tk in values {
                let x = (a / tk).powi(2);
                if x < 2e-15 {
                    // remaining factors differ from 1 by less than 1e-15
                    let rest: f64 = values.iter().filter(|v| **v >= tk).map(|v| (a / v).powi(2)).sum();
                    s += 0.5 * rest;
                    break;
                }
                s += 0.5 * x.ln_1p();
            }
            s
        }
        ZeroSequence::Power { scale, exponent } => {
            let (c, q) = (*scale, *exponent);
            let mut s = 0.0;
            let mut k = 1usize;
            loop {
                let tk = c * (k as f64).powf(q);
                let x = (a / tk).powi(2);
                if x < 1e-6 {
                    // Euler-Maclaurin on h(u) = ln(1 + x(u)), x(u) = (a/c)^2 u^(-2q)
                    let kf = k as f64;
                    let a2 = (a / c).powi(2);
                    let int1 = a2 / ((2.0 * q - 1.0) * kf.powf(2.0 * q - 1.0));
                    let int2 = a2 * a2 / (2.0 * (4.0 * q - 1.0) * kf.powf(4.0 * q - 1.0));
                    let d1 = q * x / (6.0 * kf);
                    let d3 = 2.0 * q * (2.0 * q + 1.0) * (2.0 * q + 2.0) * x / (720.0 * kf.powi(3));
                    s += 0.5 * (int1 - int2 + 0.5 * x.ln_1p() + d1 - d3);
                    break;
                }
                s += 0.5 * x.ln_1p();
                k += 1;
            }
            s
        }
    }
}
