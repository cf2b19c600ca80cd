use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};


use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::numeric::binomial;
use crate::space::{fft, Backend, GridFunction, GroupDescriptor};
use crate::weight::WeightKind;

/// How `x~_{r,k}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Trapezoid quadrature of `int K_r(u) U(n u) x du` on grid-aligned shifts.
    TimeQuadrature,
    /// Fourier multiplier `sum_n (-1)^(n+1) C(k, n) F[K_r](n m)` (periodic only).
    Multiplier,
}

/// `(-1)^(n+1) C(k, n)`.
fn combination_weight(k: usize, n: usize) -> f64 {
    let s = if n % 2 == 1 { 1.0 } else { -1.0 };
    s * binomial(k, n)
}

/// Growth exponent of `alpha / ((1+|t|) M_U)^k` at infinity.
fn excess_growth(kernel: &Kernel, group: &GroupDescriptor, k: usize) -> f64 {
    let g = |t: f64| {
        let mu = match group {
            GroupDescriptor::Periodic => 0.0,
            GroupDescriptor::Line(w) => w.ln_value(t),
        };
        kernel.alpha().ln_value(t) - k as f64 * (t.ln_1p() + mu)
    };
    (g(1e6) - g(1e3)) / 1e3f64.ln()
}

/// `int ((1 + |t|) M_U(|t|))^k / alpha(t) dt` for the kernel's weight; fails
/// with `BackendMismatch` when the integral diverges.
pub fn weight_integral(kernel: &Kernel, group: &GroupDescriptor, k: usize) -> Result<f64> {
    if excess_growth(kernel, group, k) <= 1.2 {
        return Err(Error::BackendMismatch(format!(
            "kernel weight {} does not dominate ((1+|t|) M_U)^{k}",
            kernel.alpha().label()
        )));
    }
    if let (WeightKind::GroupComposed { k: ka, base }, GroupDescriptor::Periodic) = (kernel.alpha().kind(), group) {
        if *ka as usize == k && matches!(base, crate::weight::GroupBound::Unit) {
            return Ok(2.0);
        }
    }
    let f = |t: f64| {
        let mu = match group {
            GroupDescriptor::Periodic => 0.0,
            GroupDescriptor::Line(w) => w.ln_value(t),
        };
        (k as f64 * (t.ln_1p() + mu) - kernel.alpha().ln_value(t)).exp()
    };
    let half = crate::quadrature::integrate_to_infinity(f, 0.0, Default::default())?;
    Ok(2.0 * half.value)
}

#[derive(Debug)]
enum PlanData {
    /// FFT-ordered multiplier applied to the coefficients.
    Periodic(Vec<Complex64>),
    /// Symmetric taps `w_l`, `l = 0..=L`, combined over `n`.
    Line(Vec<f64>),
}

/// Precomputed smoothing operator for one `(r, k)` on one grid.
#[derive(Debug)]
pub struct SmoothingPlan {
    pub r: f64,
    pub k: usize,
    pub route: Route,
    data: PlanData,
}

/// Trapezoid weights `step * K_r(l * step)` for `l = 0..=L` with
/// `L * step <= T / r`.
fn kernel_taps(kernel: &Kernel, r: f64, step: f64, limit: usize) -> Vec<f64> {
    let reach = kernel.half_width() / r;
    let l_max = ((reach / step).floor() as usize).min(limit);
    crate::par::map_range(l_max + 1, |l| step * kernel.eval_scaled(r, l as f64 * step))
}

impl SmoothingPlan {
    /// `refine` subdivides the time-quadrature step (1 = grid aligned).
    pub fn new(kernel: &Kernel, backend: &Backend, r: f64, k: usize, route: Route, refine: usize) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(crate::error::invalid("r", "must be positive"));
        }
        if k == 0 || k > crate::smoothness::MAX_ORDER {
            return Err(crate::error::invalid("k", "must lie in 1..=12"));
        }
        let refine = refine.max(1);
        let data = match (backend, route) {
            (Backend::Periodic { n }, Route::Multiplier) => {
                let n = *n;
                let g: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let m = fft::frequency(j, n) as f64;
                        let v: f64 = (1..=k)
                            .map(|nn| combination_weight(k, nn) * kernel.transform(nn as f64 * m / r))
                            .sum();
                        Complex64::new(v, 0.0)
                    })
                    .collect();
                PlanData::Periodic(g)
            }
            (Backend::Periodic { n }, Route::TimeQuadrature) => {
                let n = *n;
                let delta = 2.0 * PI / n as f64;
                let mut total = vec![Complex64::new(0.0, 0.0); n];
                for nn in 1..=k {
                    // nodes u_l = l delta / (nn refine): shifts nn u_l = l delta / refine
                    let sub = nn * refine;
                    let taps = kernel_taps(kernel, r, delta / sub as f64, usize::MAX);
                    // periodized weights on the refined circle of n * refine points
                    let big = n * refine;
                    let mut c = vec![Complex64::new(0.0, 0.0); big];
                    for (l, w) in taps.iter().enumerate() {
                        c[l % big] += w;
                        if l > 0 {
                            c[(big - l % big) % big] += w;
                        }
                    }
                    let g = fft::inverse(&c);
                    let cw = combination_weight(k, nn);
                    for (j, t) in total.iter_mut().enumerate() {
                        let m = fft::frequency(j, n);
                        *t += g[m.rem_euclid(big as i64) as usize] * cw;
                    }
                }
                PlanData::Periodic(total)
            }
            (Backend::Line(g), Route::TimeQuadrature) => {
                if refine > 1 {
                    return Err(crate::error::invalid("refine", "line shifts must stay on the grid"));
                }
                let h = g.step();
                let mut combined = vec![0.0; g.len()];
                for nn in 1..=k {
                    let taps = kernel_taps(kernel, r, h / nn as f64, g.len() - 1);
                    let cw = combination_weight(k, nn);
                    for (c, w) in combined.iter_mut().zip(&taps) {
                        *c += cw * w;
                    }
                }
                PlanData::Line(combined)
            }
            (Backend::Line(_), Route::Multiplier) => {
                return Err(Error::BackendMismatch("the multiplier route needs the periodic backend".into()))
            }
        };
        Ok(Self { r, k, route, data })
    }

    pub fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        match (&self.data, x.backend()) {
            (PlanData::Periodic(g), Backend::Periodic { n }) if g.len() == *n => {
                let c = x.coefficients()?;
                let out: Vec<Complex64> = c.iter().zip(g).map(|(a, b)| a * b).collect();
                x.from_coefficients_like(&out)
            }
            (PlanData::Line(taps), Backend::Line(grid)) if taps.len() == x.len() => {
                x.check_window()?;
                let n = x.len();
                let m = (2 * n).next_power_of_two();
                let mut xs = vec![Complex64::new(0.0, 0.0); m];
                xs[..n].copy_from_slice(x.values());
                let mut w = vec![Complex64::new(0.0, 0.0); m];
                w[0] += taps[0];
                for (l, v) in taps.iter().enumerate().skip(1) {
                    w[l] += v;
                    w[m - l] += v;
                }
                let fx = fft::forward(&xs);
                let fw = fft::forward(&w);
                let prod: Vec<Complex64> = fx.iter().zip(&fw).map(|(a, b)| a * b * m as f64).collect();
                let mut y = fft::inverse(&prod);
                y.truncate(n);
                GridFunction::line(grid.clone(), y, x.p())
            }
            _ => Err(Error::BackendMismatch("plan built for a different grid".into())),
        }
    }
}

/// Smoothing operators for a fixed kernel and order `k`, with per-`r` plans
/// cached across inputs.
pub struct Smoother<'a> {
    kernel: &'a Kernel,
    k: usize,
    plans: Mutex<HashMap<(u64, usize, Route, u64), Arc<SmoothingPlan>>>,
}

impl<'a> Smoother<'a> {
    pub fn new(kernel: &'a Kernel, k: usize) -> Self {
        Self {
            kernel,
            k,
            plans: Mutex::new(HashMap::new()),
        }
    }

    pub fn kernel(&self) -> &Kernel {
        self.kernel
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn plan(&self, x: &GridFunction, r: f64, route: Route) -> Result<Arc<SmoothingPlan>> {
        let step = match x.backend() {
            Backend::Periodic { n } => 2.0 * PI / *n as f64,
            Backend::Line(g) => g.step(),
        };
        let key = (r.to_bits(), x.len(), route, step.to_bits());
        if let Some(p) = self.plans.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(p.clone());
        }
        weight_integral(self.kernel, &x.group(), self.k)?;
        let plan = Arc::new(SmoothingPlan::new(self.kernel, x.backend(), r, self.k, route, 1)?);
        self.plans
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, plan.clone());
        Ok(plan)
    }

    /// `x~_{r,k}` by time quadrature.
    pub fn smooth(&self, x: &GridFunction, r: f64) -> Result<GridFunction> {
        self.smooth_route(x, r, Route::TimeQuadrature)
    }

    pub fn smooth_route(&self, x: &GridFunction, r: f64, route: Route) -> Result<GridFunction> {
        self.plan(x, r, route)?.apply(x)
    }
}

/// `x~_{r,k} = sum_{n=1}^k (-1)^(n+1) C(k, n) x_{r,n}` by time quadrature.
pub fn smooth_vector(x: &GridFunction, r: f64, k: usize, kernel: &Kernel) -> Result<GridFunction> {
    Smoother::new(kernel, k).smooth(x, r)
}

/// Single component `x_{r,n} = int K_r(u) U(n u) x du` (periodic, time quadrature).
pub fn smooth_component(x: &GridFunction, r: f64, n: usize, kernel: &Kernel) -> Result<GridFunction> {
    let Backend::Periodic { n: len } = *x.backend() else {
        return Err(Error::BackendMismatch("components are exposed on the periodic backend".into()));
    };
    let delta = 2.0 * PI / len as f64;
    let taps = kernel_taps(kernel, r, delta / n as f64, usize::MAX);
    let mut c = vec![Complex64::new(0.0, 0.0); len];
    for (l, w) in taps.iter().enumerate() {
        c[l % len] += w;
        if l > 0 {
            c[(len - l % len) % len] += w;
        }
    }
    let g = fft::inverse(&c);
    x.apply_multiplier(|m| g[m.rem_euclid(len as i64) as usize])
}

/// Time quadrature with the step divided by `refine` (periodic: the shifted
/// samples come from the trigonometric interpolant).
pub fn smooth_vector_refined(x: &GridFunction, r: f64, k: usize, kernel: &Kernel, refine: usize) -> Result<GridFunction> {
    weight_integral(kernel, &x.group(), k)?;
    SmoothingPlan::new(kernel, x.backend(), r, k, Route::TimeQuadrature, refine)?.apply(x)
}
