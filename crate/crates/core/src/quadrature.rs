//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]`, first splitting into `panels` equal pieces.
pub fn integrate_panels<F>(f: F, a: f64, b: f64, panels: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("bounds must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut segs: Vec<Segment> = (0..panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == panels { b } else { lo + width };
            gk15(&f, lo, hi)
        })
        .collect();

    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                intervals: segs.len(),
            });
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {error:.3e} above target {target:.3e} after {} intervals",
                segs.len()
            )));
        }
        // Bisect the worst few segments in one pass.
        segs.sort_by(|x, y| y.error.total_cmp(&x.error));
        let split = (segs.len() / 8).max(1);
        let worst: Vec<Segment> = segs.drain(..split).collect();
        for s in worst {
            let mid = 0.5 * (s.a + s.b);
            if mid <= s.a || mid >= s.b {
                return Err(Error::Quadrature("interval collapsed below machine precision".into()));
            }
            segs.push(gk15(&f, s.a, mid));
            segs.push(gk15(&f, mid, s.b));
        }
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_panels(f, a, b, 1, opts)
}

/// Integrates `f` over `[a, inf)` through the map `t = a + u / (1 - u)`.
pub fn integrate_to_infinity<F>(f: F, a: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_panels(
        |u: f64| {
            let one_minus = 1.0 - u;
            if one_minus <= 0.0 {
                return 0.0;
            }
            let t = a + u / one_minus;
            let v = f(t) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        8,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x, 0.0, 3.0, QuadOptions::default()).unwrap();
        assert!((r.value - 9.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_with_panels() {
        let r = integrate_panels(|x| x.cos(), 0.0, 100.0 * PI, 50, QuadOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_decay() {
        let r = integrate_to_infinity(|t| 1.0 / (1.0 + t).powi(2), 0.0, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let g = integrate_to_infinity(|t| (-t * t).exp(), 0.0, QuadOptions::default()).unwrap();
        assert!((g.value - PI.sqrt() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn gives_up_on_budget() {
        let opts = QuadOptions {
            max_intervals: 4,
            ..QuadOptions::default()
        };
        assert!(integrate(|x: f64| x.abs().sqrt().recip(), 1e-300, 1.0, opts).is_err());
    }
}
