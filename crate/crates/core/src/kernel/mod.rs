//! Entire kernels of exponential type: the product kernel built from an
//! admissible weight, the Fejer-type kernel for polynomial weights, their
//! dilations, transforms and certified decay constants.

mod certify;
mod product;
mod sequence;

pub use certify::{certify_bounds, default_cert_grid, CertificationReport, CertificationRow};
pub use product::sinc_derivatives;
pub use sequence::{compute_ak, select_q, QSequence};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numeric::binomial;
use crate::weight::{LogWeight, Weight};
use product::SincProduct;

pub const DEFAULT_N_PROD: usize = 4096;
pub const DEFAULT_DELTA: f64 = 0.1;

/// Quadrature settings for the kernel normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    /// Trapezoid step; the rule is exact for band-limited integrands of type
    /// below `2 pi / step`.
    pub step: f64,
    /// Target for `int_{|t|>T} f / ||f||_1`.
    pub tail_tol: f64,
    /// Largest admissible half-width `T`.
    pub max_half_width: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            step: 0.5,
            tail_tol: 1e-12,
            max_half_width: 1e6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub weight: Weight,
    pub n_prod: usize,
    pub delta: f64,
    pub quad: QuadSpec,
}

impl KernelSpec {
    pub fn new(weight: Weight) -> Self {
        Self {
            weight,
            n_prod: DEFAULT_N_PROD,
            delta: DEFAULT_DELTA,
            quad: QuadSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    Product { n_prod: usize, delta: f64, s: f64 },
    Fejer { m: u32 },
}

/// A normalized, even, nonnegative entire kernel `K = f / ||f||_1`.
#[derive(Debug, Clone)]
pub struct Kernel {
    family: KernelFamily,
    /// Weight `alpha` whose reciprocal bounds the kernel's decay.
    alpha: Weight,
    a_seq: Vec<f64>,
    product: SincProduct,
    partial_sum_a: f64,
    l1_norm: f64,
    half_width: f64,
    tail_bound: f64,
    /// `f(j * step)` for `j = 0..=T / step`.
    samples: Vec<f64>,
    step: f64,
    certification: Vec<CertificationReport>,
}

/// Builds the product kernel for an admissible weight.
pub fn build_kernel(spec: &KernelSpec) -> Result<Kernel> {
    let beta = LogWeight::new(spec.weight.clone());
    let qs = select_q(&beta, spec.n_prod, spec.delta)?;
    let a = compute_ak(&beta, &qs.q, qs.s, spec.n_prod);
    let family = KernelFamily::Product {
        n_prod: spec.n_prod,
        delta: spec.delta,
        s: qs.s,
    };
    assemble(family, spec.weight.clone(), a, spec.quad)
}

/// Fejer-type kernel `sinc^(2m)(t / 2m) / K_m`, paired with the polynomial
/// weight `(1 + |t|)^(2m)`.
pub fn fejer_kernel(m: u32) -> Result<Kernel> {
    if m < 1 {
        return Err(invalid("m", "must be at least 1"));
    }
    let alpha = Weight::polynomial_bound(1.0, m)?;
    let a = vec![1.0 / m as f64; m as usize];
    assemble(KernelFamily::Fejer { m }, alpha, a, QuadSpec::default())
}

/// `int sinc^(2m)(t / 2m) dt = 2m int (sin u / u)^(2m) du` in closed form.
pub fn fejer_normalizer(m: u32) -> Option<f64> {
    if !(1..=10).contains(&m) {
        return None;
    }
    let n = 2 * m as i128;
    let mut sum: i128 = 0;
    for k in 0..=n / 2 {
        let c = binomial(n as usize, k as usize) as i128;
        let term = c * (n - 2 * k).pow((n - 1) as u32);
        sum += if k % 2 == 0 { term } else { -term };
    }
    let fact: f64 = (1..n).map(|j| j as f64).product();
    let int = std::f64::consts::PI * sum as f64 / (2f64.powi((n - 1) as i32) * fact);
    Some(2.0 * m as f64 * int)
}

/// Cardinal B-spline of order `n` (support `[0, n]`) by the Cox-de Boor
/// recursion.
fn cardinal_bspline(n: usize, x: f64) -> f64 {
    // b[i] holds N_j(x - i) for the current order j
    let mut b: Vec<f64> = (0..n)
        .map(|i| {
            let y = x - i as f64;
            if (0.0..1.0).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for j in 2..=n {
        let jf = j as f64;
        for i in 0..=n - j {
            let y = x - i as f64;
            b[i] = (y * b[i] + (jf - y) * b[i + 1]) / (jf - 1.0);
        }
    }
    b[0]
}

/// Rigorous envelope `prod_k min(1, (2 / (a_k t))^2)` of `f`, in log form,
/// plus the number of factors in the decaying regime.
fn ln_envelope(a: &[f64], t: f64) -> (f64, usize) {
    let mut s = 0.0;
    let mut j = 0;
    for &ak in a {
        let y = ak * t;
        if y > 2.0 {
            s += 2.0 * (2.0 / y).ln();
            j += 1;
        }
    }
    (s, j)
}

fn assemble(family: KernelFamily, alpha: Weight, a_seq: Vec<f64>, quad: QuadSpec) -> Result<Kernel> {
    if a_seq.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(invalid("a_seq", "frequencies must be positive"));
    }
    let product = SincProduct::new(a_seq.clone());
    let partial_sum_a = product.type_sum();
    if !(2.0 * std::f64::consts::PI / quad.step > 2.0 * partial_sum_a) {
        return Err(Error::Quadrature(format!(
            "trapezoid step {} too coarse for type {partial_sum_a}",
            quad.step
        )));
    }
    let fejer_norm = match family {
        KernelFamily::Fejer { m } => fejer_normalizer(m),
        _ => None,
    };
    // Grow T until the analytic tail bound is below tolerance.
    let mut sorted = a_seq.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut half_width = 16.0;
    let (tail, samples) = loop {
        let n = (half_width / quad.step).ceil() as usize;
        let samples: Vec<f64> = crate::par::map_range(n + 1, |j| product.value(j as f64 * quad.step));
        let trap = quad.step * (samples[0] + 2.0 * samples[1..].iter().sum::<f64>());
        let t_end = n as f64 * quad.step;
        let (ln_e, jdec) = ln_envelope(&sorted, t_end);
        // int_T^inf E and the trapezoid remainder sum_{jh > T} h E(jh) are
        // both below E(T) (T / (2J - 1) + h).
        let tail = if jdec >= 1 {
            2.0 * ln_e.exp() * (t_end / (2.0 * jdec as f64 - 1.0) + quad.step)
        } else {
            f64::INFINITY
        };
        let norm = fejer_norm.unwrap_or(trap);
        if tail <= quad.tail_tol * norm || fejer_norm.is_some() && half_width >= 4096.0 {
            break (tail, samples);
        }
        if half_width >= quad.max_half_width {
            return Err(Error::Quadrature(format!(
                "tail bound {tail:.3e} above tolerance at half-width {half_width}"
            )));
        }
        half_width *= 2.0;
    };
    let n = samples.len() - 1;
    let trap = quad.step * (samples[0] + 2.0 * samples[1..].iter().sum::<f64>());
    let l1_norm = fejer_norm.unwrap_or(trap);
    Ok(Kernel {
        family,
        alpha,
        a_seq,
        product,
        partial_sum_a,
        l1_norm,
        half_width: n as f64 * quad.step,
        tail_bound: tail / l1_norm,
        samples,
        step: quad.step,
        certification: Vec::new(),
    })
}

impl Kernel {
    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn alpha(&self) -> &Weight {
        &self.alpha
    }

    pub fn a_seq(&self) -> &[f64] {
        &self.a_seq
    }

    /// Exponential type of the truncated product, `sum a_k <= 1`.
    pub fn partial_sum_a(&self) -> f64 {
        self.partial_sum_a
    }

    pub fn type_bound(&self) -> f64 {
        self.partial_sum_a
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Half-width `T` of the normalization quadrature.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Bound on `int_{|t|>T} K`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `f(t)` of the unnormalized product.
    pub fn raw(&self, t: f64) -> f64 {
        self.product.value(t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.product.value(t) / self.l1_norm
    }

    pub fn ln_eval(&self, t: f64) -> f64 {
        self.product.ln_value(t) - self.l1_norm.ln()
    }

    /// `K_r(t) = r K(r t)`.
    pub fn eval_scaled(&self, r: f64, t: f64) -> f64 {
        r * self.eval(r * t)
    }

    /// `ln |K^(i)(t)|` for `i = 0..=order` (`order <= 12`).
    pub fn ln_abs_derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let ln_norm = self.l1_norm.ln();
        self.product
            .ln_abs_derivatives(t, order.min(product::MAX_ORDER))
            .into_iter()
            .map(|v| v - ln_norm)
            .collect()
    }

    /// Signed derivatives `K^(i)(t)`, `i = 0..=order`.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let (c, ln_scale) = self.product.jet(t, order.min(product::MAX_ORDER));
        let scale = (ln_scale - self.l1_norm.ln()).exp();
        let mut fact = 1.0;
        c.iter()
            .enumerate()
            .map(|(i, v)| {
                if i > 0 {
                    fact *= i as f64;
                }
                v * fact * scale
            })
            .collect()
    }

    /// `F[K](zeta) = int K(t) e^{-i zeta t} dt`. Zero beyond the type
    /// (Paley-Wiener); the trapezoid rule is exact inside it up to the tail.
    pub fn transform(&self, zeta: f64) -> f64 {
        let z = zeta.abs();
        if z > self.partial_sum_a {
            return 0.0;
        }
        if let KernelFamily::Fejer { m } = self.family {
            let n = 2 * m as usize;
            let m = m as f64;
            return cardinal_bspline(n, m * (1.0 - z)) / cardinal_bspline(n, m);
        }
        self.trapezoid_transform(z)
    }

    /// The same sum without the support cutoff, valid while
    /// `|zeta| + type < 2 pi / step`.
    pub fn trapezoid_transform(&self, zeta: f64) -> f64 {
        let h = self.step;
        let mut s = self.samples[0];
        for (j, v) in self.samples.iter().enumerate().skip(1) {
            s += 2.0 * v * (zeta * j as f64 * h).cos();
        }
        h * s / self.l1_norm
    }

    pub fn certification(&self) -> &[CertificationReport] {
        &self.certification
    }

    /// Runs [`certify_bounds`] for each `r` and stores the reports.
    pub fn certify(mut self, rs: &[f64], n_max: usize) -> Result<Self> {
        let mut reports = Vec::with_capacity(rs.len());
        for &r in rs {
            let grid = default_cert_grid(&self, r);
            reports.push(certify_bounds(&self, r, n_max, &grid)?);
        }
        self.certification = reports;
        Ok(self)
    }

    /// `c_hat` of property 3 (`n = 0`) at scale `r`, if certified.
    pub fn decay_constant(&self, r: f64) -> Option<f64> {
        self.certification
            .iter()
            .find(|c| c.r == r)
            .and_then(|c| c.rows.first())
            .map(|row| row.c_hat)
    }

    /// Samples `(t, K(t))` on `[-t_max, t_max]`.
    pub fn table(&self, t_max: f64, count: usize) -> Vec<(f64, f64)> {
        let count = count.max(2);
        (0..count)
            .map(|i| {
                let t = -t_max + 2.0 * t_max * i as f64 / (count - 1) as f64;
                (t, self.eval(t))
            })
            .collect()
    }

    pub fn metadata(&self) -> KernelMetadata {
        KernelMetadata {
            family: self.family.clone(),
            alpha: self.alpha.label(),
            factors: self.a_seq.len(),
            a_first: self.a_seq.iter().take(8).cloned().collect(),
            partial_sum_a: self.partial_sum_a,
            l1_norm: self.l1_norm,
            quad_half_width: self.half_width,
            quad_step: self.step,
            tail_bound: self.tail_bound,
            peak: self.eval(0.0),
            certification: self.certification.clone(),
        }
    }
}

/// JSON-facing summary of a kernel.
#[derive(Debug, Clone, Serialize)]
pub struct KernelMetadata {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub alpha: String,
    pub factors: usize,
    pub a_first: Vec<f64>,
    pub partial_sum_a: f64,
    pub l1_norm: f64,
    pub quad_half_width: f64,
    pub quad_step: f64,
    pub tail_bound: f64,
    pub peak: f64,
    pub certification: Vec<CertificationReport>,
}

/// Fejer order `m = ceil((k + 2) / 2)` covering `(1 + |t|)^(k+2)`.
pub fn fejer_order_for(k: u32) -> u32 {
    (k + 2).div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_panels, QuadOptions};
    use crate::weight::{alpha_from_group, make_weight, GroupBound, WeightKind};
    use std::f64::consts::PI;

    fn poly3() -> Kernel {
        build_kernel(&KernelSpec::new(alpha_from_group(GroupBound::Unit, 1).unwrap())).unwrap()
    }

    #[test]
    fn fejer_normalizer_closed_form() {
        assert!((fejer_normalizer(1).unwrap() - 2.0 * PI).abs() < 1e-14);
        // 2m int (sin u/u)^(2m), m = 2: int (sin u/u)^4 = 2 pi / 3
        assert!((fejer_normalizer(2).unwrap() - 4.0 * 2.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn fejer_m1_closed_form() {
        let k = fejer_kernel(1).unwrap();
        assert!((k.eval(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        for t in [0.5, 3.0, 17.0] {
            let want = (0.5f64 * t).sin().powi(2) / (0.5 * t).powi(2) / (2.0 * PI);
            assert!((k.eval(t) - want).abs() < 1e-15);
        }
        for z in [0.0, 0.3, 0.9] {
            assert!((k.transform(z) - (1.0 - z)).abs() < 1e-15, "z={z}");
            assert!((k.trapezoid_transform(z) - (1.0 - z)).abs() < 1e-3, "z={z}");
        }
        assert_eq!(k.transform(1.5), 0.0);
    }

    #[test]
    fn product_kernel_basic_invariants() {
        let k = poly3();
        assert!(k.partial_sum_a() > 0.9 && k.partial_sum_a() <= 1.0);
        assert!((k.eval(0.0) - 1.0 / k.l1_norm()).abs() < 1e-15);
        for t in [0.1, 2.0, 50.0] {
            assert_eq!(k.eval(t), k.eval(-t));
            assert!((k.eval_scaled(2.0, t) - 2.0 * k.eval(2.0 * t)).abs() < 1e-16);
        }
        let half = integrate_panels(|t| k.eval(t), 0.0, k.half_width(), 64, QuadOptions::default())
            .unwrap()
            .value;
        assert!((2.0 * half - 1.0).abs() < 1e-10);
        assert!((k.transform(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_fourier_oracle() {
        // K^(n)(t) = (1/pi) int_0^1 (1 - x) x^n cos(x t + n pi / 2) dx for m = 1
        let k = fejer_kernel(1).unwrap();
        for t in [0.0, 0.4, 5.0, 30.0] {
            let d = k.derivatives(t, 8);
            for n in 0..=8usize {
                let want = integrate_panels(
                    |x| (1.0 - x) * x.powi(n as i32) * (x * t + n as f64 * PI / 2.0).cos() / PI,
                    0.0,
                    1.0,
                    8,
                    QuadOptions::default(),
                )
                .unwrap()
                .value;
                assert!((d[n] - want).abs() < 1e-12, "t={t} n={n} {} {want}", d[n]);
            }
        }
    }

    #[test]
    fn exp_power_kernel_builds() {
        let w = make_weight(WeightKind::ExpPower { exponent: 0.5 }).unwrap();
        let k = build_kernel(&KernelSpec::new(w)).unwrap();
        assert!(k.partial_sum_a() > 0.85 && k.partial_sum_a() <= 1.0);
        assert!(k.tail_bound() < 1e-11);
    }

    #[test]
    fn fejer_transform_matches_trapezoid() {
        let k = fejer_kernel(3).unwrap();
        for z in [0.0, 0.2, 0.55, 0.95] {
            assert!((k.transform(z) - k.trapezoid_transform(z)).abs() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn fejer_order() {
        assert_eq!(fejer_order_for(1), 2);
        assert_eq!(fejer_order_for(2), 2);
        assert_eq!(fejer_order_for(3), 3);
    }
}
