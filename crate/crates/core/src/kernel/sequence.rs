use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::LogWeight;

/// Growth sequence `Q_k` with the resulting full-series sum
/// `S = sum_k beta(k) Q_k / k^2`.
#[derive(Debug, Clone, Serialize)]
pub struct QSequence {
    pub q: Vec<f64>,
    /// Upper estimate of the full series.
    pub s: f64,
    /// `sum_{k<=N} beta(k) Q_k / k^2`.
    pub s_partial: f64,
    /// Upper bound on `sum_{k>N} beta(k) / k^2`.
    pub beta_tail: f64,
    pub delta: f64,
}

/// `Q_k = max(1 + delta, R_k^(-1/2))` where `R_k` is the tail of
/// `sum beta(j)/j^2` from `k` on (partial sum plus integral bound).
pub fn select_q(beta: &LogWeight, n: usize, delta: f64) -> Result<QSequence> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(crate::error::invalid("delta", "must be positive"));
    }
    if n < 8 {
        return Err(crate::error::invalid("N_prod", format!("must be at least 8, got {n}")));
    }
    let c: Vec<f64> = (1..=n)
        .map(|k| {
            let kf = k as f64;
            beta.beta(kf) / (kf * kf)
        })
        .collect();
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateWeight);
    }
    let (_, tail) = beta.weight().log_tail_bounds(n);
    if !tail.is_finite() {
        return Err(Error::Inadmissible(format!(
            "no finite tail bound for sum ln w(k)/k^2 ({})",
            beta.weight().label()
        )));
    }
    let mut r = vec![0.0; n];
    let mut acc = tail;
    for k in (0..n).rev() {
        acc += c[k];
        r[k] = acc;
    }
    let floor = 1.0 + delta;
    let q: Vec<f64> = r.iter().map(|&rk| floor.max(1.0 / rk.sqrt())).collect();
    let s_partial: f64 = c.iter().zip(&q).map(|(c, q)| c * q).sum();
    // sum_{k>N} c_k Q_k <= (1 + delta) R + sum c_k / sqrt(R_k) <= (1 + delta) R + 2 sqrt(R)
    let s = s_partial + floor * tail + 2.0 * tail.sqrt();
    Ok(QSequence {
        q,
        s,
        s_partial,
        beta_tail: tail,
        delta,
    })
}

/// `a_k = beta(k) Q_k / (S k^2)` for `k = 1..=N`.
pub fn compute_ak(beta: &LogWeight, q: &[f64], s: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            beta.beta(kf) * q[k - 1] / (s * kf * kf)
        })
        .collect()
}
