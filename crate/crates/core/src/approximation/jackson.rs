use serde::Serialize;

use super::best::{best_approx, Method};
use super::smoothing::{weight_integral, Smoother};
use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::smoothness::{DifferenceNorms, DEFAULT_N_TAU};
use crate::space::{group_bound, GridFunction, GroupDescriptor};

/// Rows with `E_r` and the modulus both below this fraction of `||x||` are
/// degenerate (`0/0`).
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JacksonVerdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "PASS-degenerate")]
    PassDegenerate,
    #[serde(rename = "FAIL")]
    Fail,
}

impl JacksonVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::PassDegenerate => "PASS-degenerate",
            Self::Fail => "FAIL",
        }
    }

    pub fn passed(self) -> bool {
        self != Self::Fail
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JacksonRow {
    pub r: f64,
    pub e_r: f64,
    pub method: Method,
    /// Reference quantity the ratio is taken against: `omega~_k(1/r, x)`, or
    /// `r^-m M_U(m/r) omega~_k(1/r, A^m x)` in derivative reports.
    pub modulus: f64,
    pub ratio: f64,
    /// `constant_estimate * slack * modulus`, when a constant is available.
    pub bound: Option<f64>,
    /// Allowance of the method tag (see [`Method::slack`]).
    pub slack: f64,
    /// `||x - x~_{r,k}||`, when requested.
    pub smoothing_error: Option<f64>,
    /// `smoothing_error <= constant_estimate * omega~_k(1/r)` and
    /// `E_r <= smoothing_error` (exact rows only).
    pub chain_ok: Option<bool>,
    /// `r^-m M_U(1/r)^m ||A^m x||` (derivative reports).
    pub norm_reference: Option<f64>,
    pub degenerate: bool,
    pub refinement_flag: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeSummary {
    pub m: usize,
    pub derivative_norm: f64,
    /// `max E_r / modulus` over nondegenerate rows.
    pub fitted_modulus_constant: f64,
    /// `max E_r / norm_reference`.
    pub fitted_norm_constant: f64,
    /// Constant for the norm form (`1` when `m = 0`).
    pub norm_constant_estimate: Option<f64>,
    /// Least-squares slope of `ln E_r` against `ln r` over rows with `E_r > 0`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacksonReport {
    pub x_ref: String,
    pub backend: String,
    pub p: String,
    pub k: usize,
    pub m: Option<usize>,
    pub norm_x: f64,
    pub rows: Vec<JacksonRow>,
    pub sup_ratio: f64,
    pub constant_estimate: Option<f64>,
    pub verdict: JacksonVerdict,
    pub derivative: Option<DerivativeSummary>,
}

#[derive(Debug, Clone)]
pub struct JacksonOptions {
    pub n_tau: usize,
    /// Adds `||x - x~_{r,k}||` and the chain check to every row.
    pub with_smoothing: bool,
    /// Forces a method instead of the best available one.
    pub method: Option<Method>,
    pub x_ref: String,
}

impl Default for JacksonOptions {
    fn default() -> Self {
        Self {
            n_tau: DEFAULT_N_TAU,
            with_smoothing: false,
            method: None,
            x_ref: "x".into(),
        }
    }
}

/// `I c_hat M~^k` with `I = int ((1+|t|) M_U)^k / alpha`: `c_hat` is the
/// certified decay constant of the kernel at `r = 1`; for bounded groups
/// `M_U` is replaced by its supremum `M~`. `I = 2` when the kernel weight was
/// built by `alpha_from_group` for this group and `k`.
pub fn constant_estimate(kernel: &Kernel, k: usize, group: &GroupDescriptor) -> Result<f64> {
    let c = kernel.decay_constant(1.0).ok_or(Error::UncertifiedKernel)?;
    if !c.is_finite() {
        return Err(Error::UncertifiedKernel);
    }
    let (integral, factor) = match group.bound_sup() {
        Some(sup) => (weight_integral(kernel, &GroupDescriptor::Periodic, k)?, sup.powi(k as i32)),
        None => (weight_integral(kernel, group, k)?, 1.0),
    };
    Ok(integral * c * factor)
}

fn check_grid(x: &GridFunction, r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Empty("r_grid"));
    }
    for &r in r_grid {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r_grid", format!("{r} is not positive")));
        }
        if r < 1.0 && !x.is_periodic() {
            return Err(invalid("r_grid", format!("{r} < 1 is only allowed on the periodic backend")));
        }
    }
    Ok(())
}

fn finish_verdict(rows: &[JacksonRow], constant: Option<f64>) -> (f64, JacksonVerdict) {
    let live: Vec<&JacksonRow> = rows.iter().filter(|r| !r.degenerate).collect();
    let sup = live.iter().map(|r| r.ratio).fold(0.0, crate::par::nan_max);
    if live.is_empty() {
        return (0.0, JacksonVerdict::PassDegenerate);
    }
    let finite = live.iter().all(|r| r.ratio.is_finite());
    let within = match constant {
        Some(c) => live.iter().all(|r| r.ratio <= c * r.slack),
        None => true,
    };
    let verdict = if finite && within { JacksonVerdict::Pass } else { JacksonVerdict::Fail };
    (sup, verdict)
}

/// Checks `E_r <= C omega~_k(1/r)` over `r_grid` with the order
/// `k` of `smoother`.
pub fn jackson_check(x: &GridFunction, r_grid: &[f64], smoother: &Smoother<'_>, opts: &JacksonOptions) -> Result<JacksonReport> {
    check_grid(x, r_grid)?;
    let k = smoother.k();
    let method = opts.method.unwrap_or_else(|| Method::for_function(x));
    let constant = constant_estimate(smoother.kernel(), k, &x.group())?;
    let norm_x = x.norm();
    let tol = DEGENERATE_TOL * norm_x;
    let diffs = DifferenceNorms::new(x, k)?;
    let rows = crate::par::map(r_grid, |&r| -> Result<JacksonRow> {
        let omega = diffs.modulus(1.0 / r, true, opts.n_tau)?;
        let e = best_approx(x, r, method, Some(smoother))?.value;
        let slack = method.slack(r, k);
        let degenerate = e <= tol && omega.value <= tol;
        let ratio = if degenerate { 0.0 } else { e / omega.value };
        let (smoothing_error, chain_ok) = if opts.with_smoothing {
            let s = x.sub(&smoother.smooth(x, r)?)?.norm();
            let ok = s <= constant * omega.value + tol && (method != Method::ExactL2 || e <= s + tol);
            (Some(s), Some(ok))
        } else {
            (None, None)
        };
        Ok(JacksonRow {
            r,
            e_r: e,
            method,
            modulus: omega.value,
            ratio,
            bound: Some(constant * slack * omega.value),
            slack,
            smoothing_error,
            chain_ok,
            norm_reference: None,
            degenerate,
            refinement_flag: omega.refinement_flag,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (sup_ratio, mut verdict) = finish_verdict(&rows, Some(constant));
    if rows.iter().any(|r| r.chain_ok == Some(false)) {
        verdict = JacksonVerdict::Fail;
    }
    Ok(JacksonReport {
        x_ref: opts.x_ref.clone(),
        backend: x.backend().tag().into(),
        p: x.p().label(),
        k,
        m: None,
        norm_x,
        rows,
        sup_ratio,
        constant_estimate: Some(constant),
        verdict,
        derivative: None,
    })
}

/// Derivative form: `E_r(x) <= C r^-m M_U(m/r) omega~_k(1/r, A^m x)` and
/// `E_r(x) <= C r^-m M_U(1/r)^m ||A^m x||`, with both `C` fitted.
pub fn jackson_derivative_check(
    x: &GridFunction,
    m: usize,
    r_grid: &[f64],
    smoother: &Smoother<'_>,
    opts: &JacksonOptions,
) -> Result<JacksonReport> {
    check_grid(x, r_grid)?;
    let k = smoother.k();
    let method = opts.method.unwrap_or_else(|| Method::for_function(x));
    let group = x.group();
    let dx = if m == 0 { x.clone() } else { x.differentiate(m as u32)? };
    let dnorm = dx.norm();
    let norm_x = x.norm();
    let tol = DEGENERATE_TOL * norm_x;
    // C for the modulus form has order k + m; the kernel weight may not cover it
    let constant = constant_estimate(smoother.kernel(), k + m, &group).ok();
    let norm_constant = if m == 0 {
        Some(1.0)
    } else {
        constant_estimate(smoother.kernel(), m, &group).ok()
    };
    let diffs = DifferenceNorms::new(&dx, k)?;
    let rows = crate::par::map(r_grid, |&r| -> Result<JacksonRow> {
        let omega = diffs.modulus(1.0 / r, true, opts.n_tau)?;
        let scale = r.powi(-(m as i32));
        let modulus = scale * group_bound(&group, m as f64 / r)? * omega.value;
        let norm_reference = scale * group_bound(&group, 1.0 / r)?.powi(m as i32) * dnorm;
        let e = best_approx(x, r, method, Some(smoother))?.value;
        let slack = method.slack(r, k + m);
        let degenerate = e <= tol && modulus <= tol;
        let ratio = if degenerate { 0.0 } else { e / modulus };
        Ok(JacksonRow {
            r,
            e_r: e,
            method,
            modulus,
            ratio,
            bound: constant.map(|c| c * slack * modulus),
            slack,
            smoothing_error: None,
            chain_ok: None,
            norm_reference: Some(norm_reference),
            degenerate,
            refinement_flag: omega.refinement_flag,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (sup_ratio, verdict) = finish_verdict(&rows, constant);
    let fitted_norm_constant = rows
        .iter()
        .filter(|r| !r.degenerate)
        .map(|r| r.e_r / r.norm_reference.unwrap_or(f64::NAN))
        .fold(0.0, crate::par::nan_max);
    let (lr, le): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.e_r > tol)
        .map(|r| (r.r.ln(), r.e_r.ln()))
        .unzip();
    Ok(JacksonReport {
        x_ref: opts.x_ref.clone(),
        backend: x.backend().tag().into(),
        p: x.p().label(),
        k,
        m: Some(m),
        norm_x,
        rows,
        sup_ratio,
        constant_estimate: constant,
        verdict,
        derivative: Some(DerivativeSummary {
            m,
            derivative_norm: dnorm,
            fitted_modulus_constant: sup_ratio,
            fitted_norm_constant,
            norm_constant_estimate: norm_constant,
            slope: crate::numeric::ls_slope(&lr, &le),
        }),
    })
}
