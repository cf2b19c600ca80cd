//! Finite differences along the shift group and the moduli of continuity
//! `omega_k` (one-sided) and `omega~_k` (symmetric).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numeric::binomial;
use crate::space::{group_bound, Backend, GridFunction};

pub const MAX_ORDER: usize = 12;
pub const DEFAULT_N_TAU: usize = 64;
/// Relative change under tau-grid doubling that raises the refinement flag.
pub const REFINEMENT_TOL: f64 = 1e-4;

fn check_order(k: usize) -> Result<()> {
    if k > MAX_ORDER {
        return Err(invalid("k", format!("must be at most {MAX_ORDER}, got {k}")));
    }
    Ok(())
}

/// `Delta_h^k x = (U(h) - I)^k x`. Periodic inputs use the equivalent Fourier
/// multiplier `(e^{imh} - 1)^k`; line inputs use the binomial sum of shifts.
pub fn finite_difference(x: &GridFunction, h: f64, k: usize) -> Result<GridFunction> {
    check_order(k)?;
    if k == 0 {
        return Ok(x.clone());
    }
    match x.backend() {
        Backend::Periodic { .. } => x.apply_multiplier(|m| (Complex64::from_polar(1.0, m as f64 * h) - 1.0).powu(k as u32)),
        Backend::Line(_) => finite_difference_binomial(x, h, k),
    }
}

/// `sum_{j=0}^k (-1)^(k-j) C(k, j) U(j h) x`.
pub fn finite_difference_binomial(x: &GridFunction, h: f64, k: usize) -> Result<GridFunction> {
    check_order(k)?;
    let mut acc = x.scale(if k % 2 == 0 { 1.0 } else { -1.0 });
    for j in 1..=k {
        let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.combine(&x.shift(j as f64 * h)?, sign * binomial(k, j))?;
    }
    Ok(acc)
}

/// Evaluates `||Delta_tau^k x||` for many `tau` with the spectrum computed
/// once (periodic) or by explicit differences (line).
pub struct DifferenceNorms<'a> {
    x: &'a GridFunction,
    k: usize,
    spectrum: Option<Vec<(i64, Complex64)>>,
    l2_energy: Option<Vec<(f64, f64)>>,
}

impl<'a> DifferenceNorms<'a> {
    pub fn new(x: &'a GridFunction, k: usize) -> Result<Self> {
        check_order(k)?;
        let (spectrum, l2_energy) = match x.backend() {
            Backend::Periodic { n } => {
                let c = x.coefficients()?;
                let n = *n;
                let spec: Vec<(i64, Complex64)> = c
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (crate::space::fft::frequency(j, n), *v))
                    .collect();
                let l2 = if x.p().value() == 2.0 {
                    // |e^{i m tau} - 1| depends on |m| only: merge +-m
                    let mut e = vec![0.0; n / 2 + 1];
                    for (m, v) in &spec {
                        e[m.unsigned_abs() as usize] += v.norm_sqr();
                    }
                    Some(
                        e.into_iter()
                            .enumerate()
                            .filter(|(m, v)| *m > 0 && *v > 0.0)
                            .map(|(m, v)| (m as f64, v))
                            .collect(),
                    )
                } else {
                    None
                };
                (Some(spec), l2)
            }
            Backend::Line(_) => (None, None),
        };
        Ok(Self {
            x,
            k,
            spectrum,
            l2_energy,
        })
    }

    pub fn norm_at(&self, tau: f64) -> Result<f64> {
        if self.k == 0 {
            return Ok(self.x.norm());
        }
        if tau == 0.0 {
            return Ok(0.0);
        }
        if let Some(e) = &self.l2_energy {
            let k = self.k as i32;
            let s: f64 = e
                .iter()
                .map(|&(m, v)| v * (2.0 * (0.5 * m * tau).sin()).powi(2 * k))
                .sum();
            return Ok((2.0 * std::f64::consts::PI * s).sqrt());
        }
        if let Some(spec) = &self.spectrum {
            let k = self.k as u32;
            let n = spec.len();
            let mut c = vec![Complex64::new(0.0, 0.0); n];
            for (j, (m, v)) in spec.iter().enumerate() {
                c[j] = v * (Complex64::from_polar(1.0, *m as f64 * tau) - 1.0).powu(k);
            }
            return Ok(self.x.from_coefficients_like(&c)?.norm());
        }
        Ok(finite_difference(self.x, tau, self.k)?.norm())
    }

    /// [`modulus`] reusing this precomputation.
    pub fn modulus(&self, t: f64, symmetric: bool, n_tau: usize) -> Result<ModulusValue> {
        if !(t >= 0.0) {
            return Err(invalid("t", "must be nonnegative"));
        }
        if n_tau < 64 {
            return Err(invalid("n_tau", format!("must be at least 64, got {n_tau}")));
        }
        sweep(self, t, symmetric, n_tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusValue {
    /// Maximum over the doubled tau grid.
    pub value: f64,
    /// Maximum over the base grid of `n_tau` steps.
    pub coarse: f64,
    pub argmax_tau: f64,
    /// Doubling the tau grid changed the maximum by more than `REFINEMENT_TOL`.
    pub refinement_flag: bool,
}

fn tau_grid(t: f64, n_tau: usize, symmetric: bool) -> Vec<f64> {
    let n = n_tau as i64;
    let lo = if symmetric { -n } else { 0 };
    (lo..=n).map(|i| t * i as f64 / n as f64).collect()
}

fn sweep(d: &DifferenceNorms<'_>, t: f64, symmetric: bool, n_tau: usize) -> Result<ModulusValue> {
    if d.k == 0 {
        let v = d.x.norm();
        return Ok(ModulusValue {
            value: v,
            coarse: v,
            argmax_tau: 0.0,
            refinement_flag: false,
        });
    }
    if t == 0.0 {
        return Ok(ModulusValue {
            value: 0.0,
            coarse: 0.0,
            argmax_tau: 0.0,
            refinement_flag: false,
        });
    }
    let fine = tau_grid(t, 2 * n_tau, symmetric);
    let norms = crate::par::map(&fine, |&tau| d.norm_at(tau));
    let mut best = (0.0f64, 0.0f64);
    let mut coarse = 0.0f64;
    for (i, (tau, v)) in fine.iter().zip(norms).enumerate() {
        let v = v?;
        if v > best.0 {
            best = (v, *tau);
        }
        if i % 2 == 0 {
            coarse = coarse.max(v);
        }
    }
    Ok(ModulusValue {
        value: best.0,
        coarse,
        argmax_tau: best.1,
        refinement_flag: best.0 > 0.0 && (best.0 - coarse) / best.0 > REFINEMENT_TOL,
    })
}

/// `sup ||Delta_tau^k x||` over `0 <= tau <= t` (one-sided) or `|tau| <= t`
/// (symmetric), as a maximum over a grid of `n_tau` steps plus its doubling.
pub fn modulus(x: &GridFunction, t: f64, k: usize, symmetric: bool, n_tau: usize) -> Result<ModulusValue> {
    DifferenceNorms::new(x, k)?.modulus(t, symmetric, n_tau)
}

/// Tabulated `omega~_k` (and optionally `omega_k`) over a `t` grid.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub k: usize,
    pub x_ref: String,
    pub backend: String,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub one_sided: Option<Vec<f64>>,
    pub refinement_flags: Vec<bool>,
}

/// Builds a [`ModulusReport`]; values are running maxima over the sorted grid,
/// so they are nondecreasing in `t` and vanish at `t = 0`.
pub fn modulus_report(
    x: &GridFunction,
    x_ref: &str,
    k: usize,
    t_grid: &[f64],
    n_tau: usize,
    with_one_sided: bool,
) -> Result<ModulusReport> {
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let curve = |symmetric: bool| -> Result<(Vec<f64>, Vec<bool>)> {
        let d = DifferenceNorms::new(x, k)?;
        let mut run = 0.0f64;
        let mut vals = Vec::with_capacity(ts.len());
        let mut flags = Vec::with_capacity(ts.len());
        for &t in &ts {
            let m = sweep(&d, t, symmetric, n_tau)?;
            run = run.max(m.value);
            vals.push(run);
            flags.push(m.refinement_flag);
        }
        Ok((vals, flags))
    };
    let (values, refinement_flags) = curve(true)?;
    let one_sided = if with_one_sided { Some(curve(false)?.0) } else { None };
    Ok(ModulusReport {
        k,
        x_ref: x_ref.to_string(),
        backend: x.backend().tag().to_string(),
        t_grid: ts,
        values,
        one_sided,
        refinement_flags,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub k: usize,
    pub points: usize,
    pub zero_at_origin: bool,
    pub monotonicity_violations: usize,
    /// `omega~(mu t) <= (1 + mu M_U(mu t))^k omega~(t)`, `mu` in {2, 3, 5}.
    pub scaling_violations: usize,
    /// `omega~(n t) <= (1 + (n-1) M_U((n-1) t))^k omega~(t)`, `n` in {2, 3}.
    pub n_step_violations: usize,
    /// Largest relative gap between one-sided and symmetric moduli.
    pub max_symmetric_gap: f64,
    /// Symmetric and one-sided moduli coincide within `1e-10` (isometric groups).
    pub one_sided_equals_symmetric: Option<bool>,
    pub refinement_flags: usize,
}

const PROPERTY_TOL: f64 = 1e-10;

/// Checks monotonicity, properties 3) and 4), and (periodic) the coincidence
/// of the one-sided and symmetric moduli on `t_grid`.
pub fn modulus_properties_check(x: &GridFunction, k: usize, t_grid: &[f64]) -> Result<PropertyReport> {
    let d = DifferenceNorms::new(x, k)?;
    let g = x.group();
    let n_tau = DEFAULT_N_TAU;
    let w = |t: f64| sweep(&d, t, true, n_tau);
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let base: Vec<ModulusValue> = ts.iter().map(|&t| w(t)).collect::<Result<_>>()?;
    let zero_at_origin = w(0.0)?.value == 0.0;
    let mut mono = 0;
    for pair in base.windows(2) {
        if pair[1].value < pair[0].value * (1.0 - REFINEMENT_TOL) {
            mono += 1;
        }
    }
    let kf = k as i32;
    let mut scaling = 0;
    let mut n_step = 0;
    for (&t, b) in ts.iter().zip(&base) {
        for mu in [2.0, 3.0, 5.0] {
            let lhs = w(mu * t)?.value;
            let rhs = (1.0 + mu * group_bound(&g, mu * t)?).powi(kf) * b.value;
            if lhs > rhs * (1.0 + PROPERTY_TOL) + f64::MIN_POSITIVE {
                scaling += 1;
            }
        }
        for n in [2.0, 3.0] {
            let lhs = w(n * t)?.value;
            let rhs = (1.0 + (n - 1.0) * group_bound(&g, (n - 1.0) * t)?).powi(kf) * b.value;
            if lhs > rhs * (1.0 + PROPERTY_TOL) + f64::MIN_POSITIVE {
                n_step += 1;
            }
        }
    }
    let mut gap = 0.0f64;
    for (&t, b) in ts.iter().zip(&base) {
        let one = sweep(&d, t, false, n_tau)?.value;
        if b.value > 0.0 {
            gap = gap.max((b.value - one).abs() / b.value);
        }
    }
    let one_sided_equals_symmetric = if x.is_periodic() { Some(gap <= PROPERTY_TOL) } else { None };
    Ok(PropertyReport {
        k,
        points: ts.len(),
        zero_at_origin,
        monotonicity_violations: mono,
        scaling_violations: scaling,
        n_step_violations: n_step,
        max_symmetric_gap: gap,
        one_sided_equals_symmetric,
        refinement_flags: base.iter().filter(|b| b.refinement_flag).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormIndex;
    use std::f64::consts::PI;

    fn exp_mode(n: i64, p: NormIndex) -> GridFunction {
        GridFunction::periodic_from_coefficients(256, p, &[(n, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn zero_order_is_identity() {
        let x = exp_mode(3, NormIndex::TWO);
        assert_eq!(finite_difference(&x, 0.3, 0).unwrap().values(), x.values());
    }

    #[test]
    fn first_difference_of_mode() {
        let x = exp_mode(4, NormIndex::TWO);
        let h = 0.21;
        let d = finite_difference(&x, h, 1).unwrap();
        let f = Complex64::from_polar(1.0, 4.0 * h) - 1.0;
        for (a, b) in x.values().iter().zip(d.values()) {
            assert!((a * f - b).norm() < 1e-13);
        }
    }

    #[test]
    fn second_difference_is_first_applied_twice() {
        let x = GridFunction::periodic_from_fn(256, NormIndex::TWO, |t| t.sin().abs()).unwrap();
        let h = 0.05;
        let d2 = finite_difference(&x, h, 2).unwrap();
        let dd = finite_difference(&finite_difference(&x, h, 1).unwrap(), h, 1).unwrap();
        let lit = finite_difference_binomial(&x, h, 2).unwrap();
        for ((a, b), c) in d2.values().iter().zip(dd.values()).zip(lit.values()) {
            assert!((a - b).norm() < 1e-13);
            assert!((a - c).norm() < 1e-13);
        }
    }

    #[test]
    fn modulus_of_mode_closed_form() {
        let n = 3.0;
        let x = exp_mode(3, NormIndex::TWO);
        for t in [0.1, 0.5, PI / n] {
            let m = modulus(&x, t, 1, true, 64).unwrap();
            let want = 2.0 * (n * t / 2.0).sin().abs() * (2.0 * PI).sqrt();
            assert!((m.value - want).abs() < 1e-12, "t={t}");
        }
        assert_eq!(modulus(&x, 0.0, 3, true, 64).unwrap().value, 0.0);
    }

    #[test]
    fn constant_has_zero_modulus() {
        let x = GridFunction::periodic_from_fn(64, NormIndex::INF, |_| 2.0).unwrap();
        for k in 1..4 {
            assert!(modulus(&x, 0.7, k, true, 64).unwrap().value < 1e-14);
        }
    }

    #[test]
    fn periodic_properties_hold() {
        let x = GridFunction::periodic_from_fn(1024, NormIndex::TWO, |t| t.sin().abs()).unwrap();
        let ts: Vec<f64> = (1..=12).map(|i| 0.02 * i as f64).collect();
        let r = modulus_properties_check(&x, 2, &ts).unwrap();
        assert!(r.zero_at_origin);
        assert_eq!(r.monotonicity_violations, 0);
        assert_eq!(r.scaling_violations, 0);
        assert_eq!(r.n_step_violations, 0);
        assert_eq!(r.one_sided_equals_symmetric, Some(true));
    }

    #[test]
    fn report_is_monotone() {
        let x = GridFunction::periodic_from_fn(512, NormIndex::INF, |t| (t.sin()).abs()).unwrap();
        let r = modulus_report(&x, "abs-sin", 1, &[0.3, 0.1, 0.0, 0.2], 64, true).unwrap();
        assert_eq!(r.t_grid, vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(r.values[0], 0.0);
        assert!(r.values.windows(2).all(|w| w[1] >= w[0]));
        let one = r.one_sided.unwrap();
        assert!(one.iter().zip(&r.values).all(|(a, b)| a <= &(b * (1.0 + 1e-12))));
    }
}
