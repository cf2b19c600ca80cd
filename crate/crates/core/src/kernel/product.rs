//! Evaluator for `f(t) = prod_k sinc^2(a_k t / 2)` and its Taylor jets.

use std::sync::OnceLock;

use crate::numeric::gauss_legendre_unit;

/// Factors with `a |t|` below this are summed through the power series of
/// `ln sinc^2`.
const SMALL: f64 = 0.1;

/// `ln sinc^2(y) = sum_j C[j] y^(2j+2)`.
const LN_SINC2: [f64; 5] = [
    -2.0 / 6.0,
    -2.0 / 180.0,
    -2.0 / 2835.0,
    -2.0 / 37800.0,
    -2.0 / 467775.0,
];

/// Above this `|x|` the forward recurrence for sinc derivatives is stable.
const RECURRENCE_FROM: f64 = 16.0;

pub const MAX_ORDER: usize = 12;

fn gl40() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre_unit(40))
}

/// `d^j/dx^j (sin x / x)` for `j = 0..out.len()`.
pub fn sinc_derivatives(x: f64, out: &mut [f64]) {
    if x.abs() >= RECURRENCE_FROM {
        // (x s)^(j) = x s^(j) + j s^(j-1) = sin^(j)(x)
        let (s, c) = x.sin_cos();
        for j in 0..out.len() {
            let sin_j = match j % 4 {
                0 => s,
                1 => c,
                2 => -s,
                _ => -c,
            };
            let prev = if j == 0 { 0.0 } else { j as f64 * out[j - 1] };
            out[j] = (sin_j - prev) / x;
        }
    } else {
        // sinc(x) = int_0^1 cos(x v) dv
        let (nodes, weights) = gl40();
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&v, &w) in nodes.iter().zip(weights) {
            let (s, c) = (x * v).sin_cos();
            let cycle = [c, -s, -c, s];
            let mut p = w;
            for (j, o) in out.iter_mut().enumerate() {
                *o += p * cycle[j % 4];
                p *= v;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SincProduct {
    /// Factor frequencies, sorted in decreasing order.
    a: Vec<f64>,
    /// `power[j][i] = sum_{k>=i} (a_k / 2)^(2j+2)`.
    power: Vec<Vec<f64>>,
}

impl SincProduct {
    pub fn new(mut a: Vec<f64>) -> Self {
        a.sort_by(|x, y| y.total_cmp(x));
        let n = a.len();
        let power = (0..LN_SINC2.len())
            .map(|j| {
                let mut s = vec![0.0; n + 1];
                for i in (0..n).rev() {
                    s[i] = s[i + 1] + (a[i] / 2.0).powi(2 * j as i32 + 2);
                }
                s
            })
            .collect();
        Self { a, power }
    }

    pub fn type_sum(&self) -> f64 {
        self.a.iter().rev().sum()
    }

    fn split(&self, t: f64) -> usize {
        self.a.partition_point(|&a| a * t >= SMALL)
    }

    /// `ln f(t)`; `-inf` at exact zeros.
    pub fn ln_value(&self, t: f64) -> f64 {
        let t = t.abs();
        let j = self.split(t);
        let mut s = 0.0;
        for &a in &self.a[..j] {
            let y = 0.5 * a * t;
            s += 2.0 * (y.sin() / y).abs().ln();
        }
        let t2 = t * t;
        let mut tp = 1.0;
        for (c, p) in LN_SINC2.iter().zip(&self.power) {
            tp *= t2;
            s += c * p[j] * tp;
        }
        s
    }

    pub fn value(&self, t: f64) -> f64 {
        self.ln_value(t).exp()
    }

    /// Taylor coefficients of `f(t + h)` in `h` up to `order`, returned as
    /// `(coefficients, ln_scale)` with `f^(i)(t) = i! c_i exp(ln_scale)`.
    pub fn jet(&self, t: f64, order: usize) -> (Vec<f64>, f64) {
        let len = order + 1;
        let mut acc = vec![0.0; len];
        acc[0] = 1.0;
        let mut ln_scale = 0.0;
        let j = self.split(t.abs());
        let mut d = vec![0.0; len];
        let mut fac = vec![0.0; len];
        let mut tmp = vec![0.0; len];
        for &a in &self.a[..j] {
            let half = 0.5 * a;
            sinc_derivatives(half * t, &mut d);
            let mut p = 1.0;
            for i in 0..len {
                // d^i/dh^i sinc(a (t+h)/2) = (a/2)^i sinc^(i)
                fac[i] = d[i] * p / factorial(i);
                p *= half;
            }
            square_into(&fac, &mut tmp);
            mul_into(&mut acc, &tmp);
            let m = acc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                return (acc, f64::NEG_INFINITY);
            }
            for v in acc.iter_mut() {
                *v /= m;
            }
            ln_scale += m.ln();
        }
        // small factors: L(t+h) = sum_j c_j P_j (t+h)^(2j+2)
        let mut l = vec![0.0; len];
        for (jj, (c, p)) in LN_SINC2.iter().zip(&self.power).enumerate() {
            let deg = 2 * jj + 2;
            let w = c * p[j];
            for (i, li) in l.iter_mut().enumerate().take(deg.min(order) + 1) {
                *li += w * crate::numeric::binomial(deg, i) * t.powi((deg - i) as i32);
            }
        }
        let l0 = l[0];
        l[0] = 0.0;
        // exp of a series with zero constant term
        let mut e = vec![0.0; len];
        e[0] = 1.0;
        for n in 1..len {
            let mut s = 0.0;
            for k in 1..=n {
                s += k as f64 * l[k] * e[n - k];
            }
            e[n] = s / n as f64;
        }
        mul_into(&mut acc, &e);
        (acc, ln_scale + l0)
    }

    /// `ln |f^(i)(t)|` for `i = 0..=order`.
    pub fn ln_abs_derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let (c, ln_scale) = self.jet(t, order);
        c.iter()
            .enumerate()
            .map(|(i, v)| v.abs().ln() + ln_scale + factorial(i).ln())
            .collect()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn square_into(a: &[f64], out: &mut [f64]) {
    for n in 0..out.len() {
        out[n] = (0..=n).map(|k| a[k] * a[n - k]).sum();
    }
}

fn mul_into(acc: &mut [f64], b: &[f64]) {
    for n in (0..acc.len()).rev() {
        acc[n] = (0..=n).map(|k| acc[k] * b[n - k]).sum();
    }
}
