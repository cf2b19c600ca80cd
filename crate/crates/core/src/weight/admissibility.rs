use std::collections::HashMap;

use serde::Serialize;

use super::{CarlemanSequence, Weight};
use crate::error::{invalid, Error, Result};
use crate::numeric::{ln_factorial, log_add_exp, ls_slope};

/// Number of terms in the partial sum of `ln w(k) / k^2`.
pub const ADMISSIBILITY_TERMS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    Inadmissible,
    Undecided,
}

/// `beta(t) = ln w(t)` together with the weight it came from.
#[derive(Debug, Clone)]
pub struct LogWeight {
    weight: Weight,
}

impl LogWeight {
    pub fn new(weight: Weight) -> Self {
        Self { weight }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn beta(&self, t: f64) -> f64 {
        self.weight.ln_value(t)
    }

    /// `beta(t) / t` on `t = 10, 100, ..., 10^5`.
    pub fn growth_ratios(&self) -> Vec<(f64, f64)> {
        (1..=5)
            .map(|j| {
                let t = 10f64.powi(j);
                (t, self.beta(t) / t)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.growth_ratios().iter().all(|&(_, r)| r == 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub weight: String,
    pub terms: usize,
    pub partial_sum: f64,
    pub tail_lower: f64,
    pub tail_upper: f64,
    pub upper_bound: f64,
    pub partial_sums_monotone: bool,
    pub grid_points: usize,
    pub grid_half_width: f64,
    pub below_one_violations: usize,
    pub monotonicity_violations: usize,
    pub submultiplicativity_violations: usize,
    pub beta_over_t: Vec<[f64; 2]>,
    pub verdict: Verdict,
}

/// Decides condition `sum ln w(k)/k^2 < inf` by partial sum plus integral-test
/// tail, and sample-tests the class invariants on `grid` with relative tolerance
/// `tol`.
pub fn check_admissible(w: &Weight, grid: &[f64], tol: f64) -> AdmissibilityReport {
    let n = ADMISSIBILITY_TERMS;
    let mut partial = 0.0;
    let mut monotone = true;
    for k in 1..=n {
        let kf = k as f64;
        let term = w.ln_value(kf) / (kf * kf);
        if term < 0.0 || !term.is_finite() {
            monotone = false;
        }
        partial += term;
    }
    let (tail_lower, tail_upper) = w.log_tail_bounds(n);

    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut ln = |t: f64| -> f64 {
        let t = t.abs();
        *cache.entry(t.to_bits()).or_insert_with(|| w.ln_value(t))
    };

    let mut below = 0;
    let mut nonmono = 0;
    let mut pos: Vec<f64> = grid.iter().map(|t| t.abs()).collect();
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    let mut prev = f64::NEG_INFINITY;
    for &t in &pos {
        let l = ln(t);
        if l < -tol {
            below += 1;
        }
        if l < prev - tol * prev.abs().max(1.0) {
            nonmono += 1;
        }
        prev = prev.max(l);
    }
    let mut submult = 0;
    for &a in grid {
        for &b in grid {
            let lhs = ln(a + b);
            let rhs = ln(a) + ln(b);
            // ln(1 + tol) ~ tol on the weight itself
            if lhs > rhs + tol {
                submult += 1;
            }
        }
    }
    let half_width = grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));

    let violations = below + nonmono + submult > 0;
    let verdict = if violations || tail_lower.is_infinite() {
        Verdict::Inadmissible
    } else if tail_upper.is_finite() {
        Verdict::Admissible
    } else {
        Verdict::Undecided
    };
    AdmissibilityReport {
        weight: w.label(),
        terms: n,
        partial_sum: partial,
        tail_lower,
        tail_upper,
        upper_bound: partial + tail_upper,
        partial_sums_monotone: monotone,
        grid_points: grid.len(),
        grid_half_width: half_width,
        below_one_violations: below,
        monotonicity_violations: nonmono,
        submultiplicativity_violations: submult,
        beta_over_t: LogWeight::new(w.clone())
            .growth_ratios()
            .into_iter()
            .map(|(t, r)| [t, r])
            .collect(),
        verdict,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Converges,
    Diverges,
    Unclear,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesEstimate {
    pub partial_sum: f64,
    /// Fitted `p` in `term ~ n^-p` over the second half of the terms.
    pub decay_exponent: Option<f64>,
    pub convergence: Convergence,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarlemanReport {
    pub terms: usize,
    pub log_integral: SeriesEstimate,
    pub root_sum: SeriesEstimate,
    pub ratio_sum: SeriesEstimate,
    pub verdict: Verdict,
}

fn estimate(terms: &[f64]) -> SeriesEstimate {
    if terms.iter().any(|t| !t.is_finite()) {
        return SeriesEstimate {
            partial_sum: f64::INFINITY,
            decay_exponent: None,
            convergence: Convergence::Diverges,
        };
    }
    let partial_sum = terms.iter().sum();
    let half = terms.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (half..terms.len())
        .filter(|&i| terms[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), terms[i].ln()))
        .unzip();
    if xs.is_empty() {
        return SeriesEstimate {
            partial_sum,
            decay_exponent: None,
            convergence: Convergence::Converges,
        };
    }
    let p = ls_slope(&xs, &ys).map(|s| -s);
    let convergence = match p {
        Some(p) if p > 1.2 => Convergence::Converges,
        Some(p) if p < 1.05 => Convergence::Diverges,
        _ => Convergence::Unclear,
    };
    SeriesEstimate {
        partial_sum,
        decay_exponent: p,
        convergence,
    }
}

/// `ln sum_n t^n / m_n`, or `None` when the available terms do not settle the
/// series.
fn ln_series(ln_m: &dyn Fn(usize) -> Option<f64>, t: f64) -> Option<f64> {
    let lt = t.ln();
    let mut acc = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut n = 0;
    loop {
        let Some(lm) = ln_m(n) else {
            return None;
        };
        let term = n as f64 * lt - lm;
        acc = log_add_exp(acc, term);
        if n > 0 && term < prev && term < acc - 40.0 {
            return Some(acc);
        }
        prev = term;
        n += 1;
    }
}

/// Partial sums of the three equivalent Denjoy-Carleman series for the
/// power-series weight `sum |t|^n / m_n`, using `n` terms of each.
pub fn carleman_report(seq: &CarlemanSequence, n: usize) -> Result<CarlemanReport> {
    let n = match seq.len_hint() {
        Some(len) => n.min(len.saturating_sub(1)),
        None => n,
    };
    if n < 8 {
        return Err(invalid("N", format!("need at least 8 terms, got {n}")));
    }
    let ln_m = |j: usize| -> Option<f64> {
        match seq {
            CarlemanSequence::Explicit { values } => {
                if j <= n {
                    values.get(j).map(|v| v.ln())
                } else {
                    None
                }
            }
            CarlemanSequence::FactorialPower { exponent } => Some(exponent * ln_factorial(j)),
        }
    };
    let m0 = ln_m(0).unwrap();
    if m0.abs() > 1e-12 {
        return Err(invalid("m_seq", "m_0 must be 1"));
    }
    let lm: Vec<f64> = (0..=n).map(|j| ln_m(j).unwrap()).collect();
    if lm.iter().any(|v| !v.is_finite()) {
        return Err(invalid("m_seq", "entries must be finite and positive"));
    }
    for j in 1..n {
        if 2.0 * lm[j] > lm[j - 1] + lm[j + 1] + 1e-12 * lm[j].abs().max(1.0) {
            return Err(Error::NotLogConvex { index: j });
        }
    }

    let a: Vec<f64> = (1..=n)
        .map(|k| {
            let kf = k as f64;
            ln_series(&ln_m, kf).map_or(f64::INFINITY, |l| l / (kf * kf))
        })
        .collect();
    let b: Vec<f64> = (1..=n).map(|j| (-lm[j] / j as f64).exp()).collect();
    let c: Vec<f64> = (1..=n).map(|j| (lm[j - 1] - lm[j]).exp()).collect();
    let (a, b, c) = (estimate(&a), estimate(&b), estimate(&c));
    let all = [a.convergence, b.convergence, c.convergence];
    let verdict = if all.iter().all(|&v| v == Convergence::Converges) {
        Verdict::Admissible
    } else if all.iter().all(|&v| v == Convergence::Diverges) {
        Verdict::Inadmissible
    } else {
        Verdict::Undecided
    };
    Ok(CarlemanReport {
        terms: n,
        log_integral: a,
        root_sum: b,
        ratio_sum: c,
        verdict,
    })
}
