use serde::Serialize;

use super::Kernel;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CertificationRow {
    pub n: usize,
    /// Empirical constant; `n = 0` is the decay constant
    /// `max K_r(t) alpha(|t|)`, `n >= 1` the derivative constant.
    pub c_hat: f64,
    pub argmax_t: f64,
    /// The maximum sits on the last grid point (grid may be too short).
    pub at_grid_end: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub r: f64,
    pub grid_points: usize,
    pub grid_max: f64,
    pub rows: Vec<CertificationRow>,
    /// Every row finite.
    pub certified: bool,
    /// Bound `r (M / K_m) (1 + 2m/r)^(2m)` for Fejer kernels.
    pub fejer_bound: Option<f64>,
}

/// Nonnegative `t` grid for certification at scale `r`: step `0.05 / r` in
/// `r t` up to `r t = 400`, then geometric out to `t = 1e5`.
pub fn default_cert_grid(kernel: &Kernel, r: f64) -> Vec<f64> {
    let u_max = 400.0f64.max(kernel.half_width().min(2000.0));
    let n = (u_max / 0.05) as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| i as f64 * 0.05 / r).collect();
    let last = u_max / r;
    g.extend(crate::numeric::geometric_grid(last * 1.05, 1e5f64.max(last * 2.0), 200));
    g
}

/// Empirical constants of the decay bound (`n = 0`) and the derivative bound
/// (`1 <= n <= n_max`) for `K_r` on `t_grid`.
pub fn certify_bounds(kernel: &Kernel, r: f64, n_max: usize, t_grid: &[f64]) -> Result<CertificationReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", "must be positive"));
    }
    if n_max > 12 {
        return Err(invalid("n_max", "must be at most 12"));
    }
    if t_grid.is_empty() {
        return Err(crate::Error::Empty("t_grid"));
    }
    let alpha = kernel.alpha();
    let ln_r = r.ln();
    // ln of |K_r^(n)(t)| alpha(|t|) at each grid point
    let values: Vec<Vec<f64>> = crate::par::map(t_grid, |&t| {
        let d = if n_max == 0 {
            vec![kernel.ln_eval(r * t)]
        } else {
            kernel.ln_abs_derivatives(r * t, n_max)
        };
        let la = alpha.ln_value(t);
        d.iter()
            .enumerate()
            .map(|(n, v)| v + (n as f64 + 1.0) * ln_r + la)
            .collect()
    });
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let denom = if n == 0 {
            0.0
        } else {
            let nf = n as f64;
            0.5 * (2.0 * std::f64::consts::PI * nf).ln() + alpha.ln_value(nf / r) + nf * ln_r
        };
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        let mut finite = true;
        for (i, v) in values.iter().enumerate() {
            let x = v[n];
            if x.is_nan() || x == f64::INFINITY {
                finite = false;
            }
            if x > best {
                best = x;
                arg = i;
            }
        }
        let c = if finite { (best - denom).exp() } else { f64::NAN };
        rows.push(CertificationRow {
            n,
            c_hat: c,
            argmax_t: t_grid[arg],
            at_grid_end: arg + 1 == t_grid.len(),
        });
    }
    let certified = rows.iter().all(|r| r.c_hat.is_finite());
    let fejer_bound = match kernel.family() {
        super::KernelFamily::Fejer { m } => {
            let m = *m as f64;
            Some(r / kernel.l1_norm() * (1.0 + 2.0 * m / r).powf(2.0 * m))
        }
        _ => None,
    };
    Ok(CertificationReport {
        r,
        grid_points: t_grid.len(),
        grid_max: t_grid.iter().cloned().fold(0.0, f64::max),
        rows,
        certified,
        fejer_bound,
    })
}
