//! Sampled function spaces with a shift group: `2 pi`-periodic functions with
//! `L_p` / uniform norms, and functions on a window `[-T, T]` of the line with
//! a weighted `L_p(mu^p)` norm.

pub mod corpus;
pub(crate) mod fft;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::weight::Weight;

/// Relative tail threshold for window refusals and the `D(A^m)` test.
pub const TAIL_TOL: f64 = 1e-6;

/// Validated norm index `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormIndex(f64);

impl NormIndex {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INF: Self = Self(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(invalid("p", format!("must lie in [1, inf], got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    pub fn label(self) -> String {
        if self.is_inf() {
            "inf".into()
        } else {
            format!("{}", self.0)
        }
    }
}

impl std::str::FromStr for NormIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" => Ok(Self::INF),
            other => other
                .parse::<f64>()
                .map_err(|_| invalid("p", format!("cannot parse {other:?}")))
                .and_then(Self::new),
        }
    }
}

/// Uniform grid `xi_j = -T + j h`, `j = 0..n`, with the weight sampled on it.
#[derive(Debug)]
pub struct LineGrid {
    half_width: f64,
    n: usize,
    step: f64,
    weight: Weight,
    ln_mu: Vec<f64>,
}

impl LineGrid {
    pub fn new(half_width: f64, n: usize, weight: Weight) -> Result<Arc<Self>> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", "must be positive"));
        }
        if n < 16 {
            return Err(invalid("n_samples", "must be at least 16"));
        }
        let step = 2.0 * half_width / (n - 1) as f64;
        let ln_mu = (0..n).map(|j| weight.ln_value(-half_width + j as f64 * step)).collect();
        Ok(Arc::new(Self {
            half_width,
            n,
            step,
            weight,
            ln_mu,
        }))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.step
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    /// `n` samples on `[0, 2 pi)`.
    Periodic { n: usize },
    Line(Arc<LineGrid>),
}

impl Backend {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Periodic { .. } => "periodic",
            Self::Line(_) => "line",
        }
    }

    pub fn group(&self) -> GroupDescriptor {
        match self {
            Self::Periodic { .. } => GroupDescriptor::Periodic,
            Self::Line(g) => GroupDescriptor::Line(g.weight.clone()),
        }
    }

    fn same_as(&self, other: &Backend) -> bool {
        match (self, other) {
            (Self::Periodic { n: a }, Self::Periodic { n: b }) => a == b,
            (Self::Line(a), Self::Line(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// The shift group of a backend together with its norm bound `M_U`.
#[derive(Debug, Clone)]
pub enum GroupDescriptor {
    /// Isometric: `M_U = 1`.
    Periodic,
    /// `M_U(t) = mu(|t|)`.
    Line(Weight),
}

impl GroupDescriptor {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Self::Periodic)
    }

    /// `sup |U(t)|` over `t` when bounded.
    pub fn bound_sup(&self) -> Option<f64> {
        match self {
            Self::Periodic => Some(1.0),
            Self::Line(_) => None,
        }
    }
}

/// `M_U(t) = sup_{|s| <= t} ||U(s)||`.
pub fn group_bound(g: &GroupDescriptor, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("must be nonnegative, got {t}")));
    }
    Ok(match g {
        GroupDescriptor::Periodic => 1.0,
        GroupDescriptor::Line(w) => w.value(t),
    })
}

/// An immutable sampled element of a periodic or weighted-line space.
#[derive(Debug, Clone)]
pub struct GridFunction {
    backend: Backend,
    values: Vec<Complex64>,
    p: NormIndex,
}

fn check_periodic_len(n: usize) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(invalid(
            "n_samples",
            format!("periodic grids need a power of two >= 16, got {n}"),
        ));
    }
    Ok(())
}

impl GridFunction {
    pub fn periodic(values: Vec<Complex64>, p: NormIndex) -> Result<Self> {
        check_periodic_len(values.len())?;
        Ok(Self {
            backend: Backend::Periodic { n: values.len() },
            values,
            p,
        })
    }

    pub fn periodic_real(values: &[f64], p: NormIndex) -> Result<Self> {
        Self::periodic(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), p)
    }

    /// Samples `f` at `xi_j = 2 pi j / n`.
    pub fn periodic_from_fn(n: usize, p: NormIndex, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_periodic_len(n)?;
        let v: Vec<f64> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        Self::periodic_real(&v, p)
    }

    /// `sum_m c_m e^{i m xi}` from `(m, c_m)` pairs with `|m| < n/2`.
    pub fn periodic_from_coefficients(n: usize, p: NormIndex, coeffs: &[(i64, Complex64)]) -> Result<Self> {
        check_periodic_len(n)?;
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for &(m, v) in coeffs {
            if m.unsigned_abs() as usize >= n / 2 {
                return Err(invalid("coefficients", format!("index {m} beyond Nyquist for n = {n}")));
            }
            c[m.rem_euclid(n as i64) as usize] += v;
        }
        Self::periodic(fft::inverse(&c), p)
    }

    pub fn line(grid: Arc<LineGrid>, values: Vec<Complex64>, p: NormIndex) -> Result<Self> {
        if values.len() != grid.n {
            return Err(invalid("values", format!("expected {} samples, got {}", grid.n, values.len())));
        }
        Ok(Self {
            backend: Backend::Line(grid),
            values,
            p,
        })
    }

    pub fn line_from_fn(grid: Arc<LineGrid>, p: NormIndex, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = (0..grid.n).map(|j| Complex64::new(f(grid.node(j)), 0.0)).collect();
        Self::line(grid, v, p)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn group(&self) -> GroupDescriptor {
        self.backend.group()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn p(&self) -> NormIndex {
        self.p
    }

    pub fn with_p(&self, p: NormIndex) -> Self {
        Self {
            p,
            ..self.clone()
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.backend, Backend::Periodic { .. })
    }

    /// Grid nodes: `2 pi j / n` (periodic) or `-T + j h` (line).
    pub fn nodes(&self) -> Vec<f64> {
        match &self.backend {
            Backend::Periodic { n } => (0..*n).map(|j| 2.0 * PI * j as f64 / *n as f64).collect(),
            Backend::Line(g) => (0..g.n).map(|j| g.node(j)).collect(),
        }
    }

    fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            backend: self.backend.clone(),
            values,
            p: self.p,
        }
    }

    fn require_periodic(&self, what: &str) -> Result<usize> {
        match self.backend {
            Backend::Periodic { n } => Ok(n),
            Backend::Line(_) => Err(Error::BackendMismatch(format!("{what} needs the periodic backend"))),
        }
    }

    /// Norm in the backend's space: trapezoid `L_p` (times `mu^p` on the
    /// line) or the sample maximum for `p = inf`.
    pub fn norm(&self) -> f64 {
        self.norm_of(&self.values)
    }

    fn norm_of(&self, values: &[Complex64]) -> f64 {
        let p = self.p.value();
        match &self.backend {
            Backend::Periodic { n } => {
                if self.p.is_inf() {
                    values.iter().fold(0.0, |m, v| m.max(v.norm()))
                } else {
                    let h = 2.0 * PI / *n as f64;
                    (h * values.iter().map(|v| v.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
                }
            }
            Backend::Line(g) => {
                if self.p.is_inf() {
                    values
                        .iter()
                        .zip(&g.ln_mu)
                        .fold(0.0, |m, (v, l)| m.max(v.norm() * l.exp()))
                } else {
                    let last = values.len() - 1;
                    let s: f64 = values
                        .iter()
                        .zip(&g.ln_mu)
                        .enumerate()
                        .map(|(j, (v, l))| {
                            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
                            w * (p * (v.norm().ln() + l)).exp()
                        })
                        .sum();
                    (g.step * s).powf(1.0 / p)
                }
            }
        }
    }

    /// Unweighted `L_p` norm on the line (equals [`norm`](Self::norm) on the circle).
    pub fn plain_norm(&self) -> f64 {
        match &self.backend {
            Backend::Periodic { .. } => self.norm(),
            Backend::Line(g) => {
                let flat = LineGrid {
                    half_width: g.half_width,
                    n: g.n,
                    step: g.step,
                    weight: Weight::constant(),
                    ln_mu: vec![0.0; g.n],
                };
                let tmp = GridFunction {
                    backend: Backend::Line(Arc::new(flat)),
                    values: Vec::new(),
                    p: self.p,
                };
                tmp.norm_of(&self.values)
            }
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.combine(other, 1.0)
    }

    /// `self + s * other`.
    pub fn combine(&self, other: &GridFunction, s: f64) -> Result<Self> {
        if !self.backend.same_as(&other.backend) || self.len() != other.len() {
            return Err(Error::BackendMismatch("operands live on different grids".into()));
        }
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b * s).collect()))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_values(self.values.iter().map(|v| v * s).collect())
    }

    /// Fourier coefficients in FFT order (periodic only).
    pub fn coefficients(&self) -> Result<Vec<Complex64>> {
        self.require_periodic("coefficients")?;
        Ok(fft::forward(&self.values))
    }

    /// Builds a periodic function from FFT-ordered coefficients.
    pub fn from_coefficients_like(&self, coeffs: &[Complex64]) -> Result<Self> {
        self.require_periodic("from_coefficients_like")?;
        Ok(self.with_values(fft::inverse(coeffs)))
    }

    /// Applies the Fourier multiplier `m -> g(m)` (periodic only).
    pub fn apply_multiplier(&self, g: impl Fn(i64) -> Complex64) -> Result<Self> {
        let n = self.require_periodic("multiplier")?;
        let mut c = fft::forward(&self.values);
        for (j, v) in c.iter_mut().enumerate() {
            *v *= g(fft::frequency(j, n));
        }
        Ok(self.with_values(fft::inverse(&c)))
    }

    /// `(U(t) x)(xi) = x(xi + t)`.
    pub fn shift(&self, t: f64) -> Result<Self> {
        match &self.backend {
            Backend::Periodic { .. } => self.apply_multiplier(|m| Complex64::from_polar(1.0, m as f64 * t)),
            Backend::Line(g) => self.line_shift(g, t),
        }
    }

    fn line_shift(&self, g: &LineGrid, t: f64) -> Result<Self> {
        if t.abs() > g.half_width {
            return Err(Error::ShiftOutOfWindow {
                t,
                half_width: g.half_width,
            });
        }
        let n = g.n;
        let s = t / g.step;
        let whole = s.round();
        // samples that leave the window: indices below ceil(s) for t > 0,
        // above n - 1 + floor(s) for t < 0
        let dropped: Vec<usize> = if s > 0.0 {
            (0..(s.ceil() as usize).min(n)).collect()
        } else {
            let keep = (n as f64 - 1.0 + s.floor()).max(-1.0);
            ((keep + 1.0) as usize..n).collect()
        };
        let fraction = self.plain_fraction(&dropped);
        if fraction > TAIL_TOL {
            return Err(Error::WindowTail { fraction });
        }
        if (s - whole).abs() < 1e-9 {
            let k = whole as i64;
            let v = (0..n as i64)
                .map(|j| {
                    let src = j + k;
                    if (0..n as i64).contains(&src) {
                        self.values[src as usize]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            return Ok(self.with_values(v));
        }
        // band-limited interpolation on a zero-padded copy
        let m = (2 * n).next_power_of_two();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..n].copy_from_slice(&self.values);
        let mut c = fft::forward(&buf);
        for (j, v) in c.iter_mut().enumerate() {
            let k = fft::frequency(j, m);
            let omega = 2.0 * PI * k as f64 / m as f64;
            *v *= if 2 * k.unsigned_abs() as usize == m {
                Complex64::new((omega * s).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, omega * s)
            };
        }
        let out = fft::inverse(&c);
        Ok(self.with_values(out[..n].to_vec()))
    }

    fn plain_fraction(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let p = self.p.value();
        if self.p.is_inf() {
            let total = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let part = idx.iter().fold(0.0f64, |m, &j| m.max(self.values[j].norm()));
            if total == 0.0 {
                0.0
            } else {
                part / total
            }
        } else {
            let total: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
            let part: f64 = idx.iter().map(|&j| self.values[j].norm().powf(p)).sum();
            if total == 0.0 {
                0.0
            } else {
                (part / total).powf(1.0 / p)
            }
        }
    }

    /// Relative (unweighted) size of the samples with `|xi| > 0.9 T`; zero on
    /// the periodic backend.
    pub fn tail_fraction(&self) -> f64 {
        match &self.backend {
            Backend::Periodic { .. } => 0.0,
            Backend::Line(g) => {
                let idx: Vec<usize> = (0..g.n).filter(|&j| g.node(j).abs() > 0.9 * g.half_width).collect();
                self.plain_fraction(&idx)
            }
        }
    }

    /// Refuses line functions that are not negligible near the window edge.
    pub fn check_window(&self) -> Result<()> {
        let fraction = self.tail_fraction();
        if fraction > TAIL_TOL {
            return Err(Error::WindowTail { fraction });
        }
        Ok(())
    }

    /// `A^m x = x^(m)`: spectral on the circle (with a `D(A^m)` tail test),
    /// central differences on the line (`m <= 4`).
    pub fn differentiate(&self, m: u32) -> Result<Self> {
        match &self.backend {
            Backend::Periodic { n } => {
                let n = *n;
                let mut c = fft::forward(&self.values);
                let mut total = 0.0;
                let mut tail = 0.0;
                for (j, v) in c.iter_mut().enumerate() {
                    let k = fft::frequency(j, n);
                    *v *= Complex64::new(0.0, k as f64).powu(m);
                    let e = v.norm_sqr();
                    total += e;
                    if k.unsigned_abs() as usize > n / 4 {
                        tail += e;
                    }
                }
                if total > 0.0 && tail / total > TAIL_TOL {
                    return Err(Error::InsufficientSmoothness {
                        order: m as usize,
                        fraction: tail / total,
                    });
                }
                Ok(self.with_values(fft::inverse(&c)))
            }
            Backend::Line(g) => {
                let stencil: &[f64] = match m {
                    0 => return Ok(self.clone()),
                    1 => &[-0.5, 0.0, 0.5],
                    2 => &[1.0, -2.0, 1.0],
                    3 => &[-0.5, 1.0, 0.0, -1.0, 0.5],
                    4 => &[1.0, -4.0, 6.0, -4.0, 1.0],
                    _ => return Err(invalid("m", "line derivatives support m <= 4")),
                };
                let half = (stencil.len() / 2) as i64;
                let scale = g.step.powi(m as i32);
                let n = self.len() as i64;
                let v = (0..n)
                    .map(|j| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for (i, w) in stencil.iter().enumerate() {
                            let src = j + i as i64 - half;
                            if (0..n).contains(&src) {
                                s += self.values[src as usize] * *w;
                            }
                        }
                        s / scale
                    })
                    .collect();
                Ok(self.with_values(v))
            }
        }
    }

    /// Largest `|m|` with `|c_m| > tol * max |c|`; `None` for the zero function.
    pub fn trig_degree(&self, tol: f64) -> Result<Option<usize>> {
        let n = self.require_periodic("trig_degree")?;
        let c = fft::forward(&self.values);
        let max = c.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if max == 0.0 {
            return Ok(None);
        }
        Ok(c.iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > tol * max)
            .map(|(j, _)| fft::frequency(j, n).unsigned_abs() as usize)
            .max())
    }
}
