use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use etj_core::approximation::{
    best_approx, constant_estimate, jackson_check, jackson_derivative_check, JacksonOptions, Method, Route, Smoother,
};
use etj_core::experiment::{run_experiment, ExperimentConfig};
use etj_core::kernel::{build_kernel, Kernel, KernelSpec};
use etj_core::smoothness::{modulus, modulus_properties_check, DEFAULT_N_TAU};
use etj_core::space::corpus::{self, CorpusName};
use etj_core::space::{GridFunction, GroupDescriptor, LineGrid, NormIndex};
use etj_core::weight::{alpha_from_group, make_weight, GroupBound, WeightKind};

const N: usize = 4096;
const SEED: u64 = 20;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn unit_kernel(k: usize) -> Kernel {
    build_kernel(&KernelSpec::new(alpha_from_group(GroupBound::Unit, k as u32).unwrap()))
        .unwrap()
        .certify(&[1.0], 0)
        .unwrap()
}

fn periodic_corpus(p: NormIndex) -> Vec<(CorpusName, GridFunction)> {
    CorpusName::PERIODIC
        .iter()
        .map(|&c| (c, corpus::periodic(c, N, p, SEED).unwrap()))
        .collect()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn parseval_tail(x: &GridFunction, r: f64) -> f64 {
    let c = x.coefficients().unwrap();
    let n = c.len();
    let d = r.floor() as i64;
    let tail: f64 = c
        .iter()
        .enumerate()
        .map(|(j, v)| (if j < n / 2 { j as i64 } else { j as i64 - n as i64 }, v))
        .filter(|(m, _)| m.abs() > d)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    (2.0 * PI * tail).sqrt()
}

fn criterion_1() -> Outcome {
    let weights = [
        alpha_from_group(GroupBound::Unit, 1).unwrap(),
        alpha_from_group(
            GroupBound::Weight {
                weight: Box::new(make_weight(WeightKind::ExpPower { exponent: 0.5 }).unwrap()),
            },
            1,
        )
        .unwrap(),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for w in weights {
        let t0 = Instant::now();
        let kernel = build_kernel(&KernelSpec::new(w.clone())).unwrap().certify(&[1.0], 0).unwrap();
        let t_max = kernel.half_width();
        let min = (0..100_000)
            .map(|i| kernel.eval(-t_max + 2.0 * t_max * i as f64 / 99_999.0))
            .fold(f64::INFINITY, f64::min);
        let integral = simpson(|t| kernel.eval(t), -t_max, t_max, 400_000);
        let c = kernel.decay_constant(1.0).unwrap();
        let elapsed = t0.elapsed();
        let pass = min >= -1e-14 && (integral - 1.0).abs() < 1e-8 && c.is_finite() && elapsed < Duration::from_secs(60);
        ok &= pass;
        parts.push(format!(
            "{}: min K={min:.2e}, |int K-1|={:.2e}, c_hat={c:.4e}, {:.1}s",
            w.label(),
            (integral - 1.0).abs(),
            elapsed.as_secs_f64()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_2(kernels: &[Kernel]) -> Outcome {
    let t0 = Instant::now();
    let xs = periodic_corpus(NormIndex::TWO);
    let mut worst = 0.0f64;
    let mut literal_worst = 0.0f64;
    for (k, kernel) in kernels.iter().enumerate().map(|(i, k)| (i + 1, k)) {
        let s = Smoother::new(kernel, k);
        for (_, x) in &xs {
            let xmax = x.coefficients().unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for j in 0..=6 {
                let r = (1u32 << j) as f64;
                let c = s.smooth(x, r).unwrap().coefficients().unwrap();
                let cut = (1.05 * r).ceil() as i64;
                let max = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let beyond = c
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| {
                        let m = if *i < N / 2 { *i as i64 } else { *i as i64 - N as i64 };
                        m.abs() > cut
                    })
                    .map(|(_, v)| v.norm())
                    .fold(0.0, f64::max);
                worst = worst.max(beyond / max.max(1e-6 * xmax));
                if max > 0.0 {
                    literal_worst = literal_worst.max(beyond / max);
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    outcome(
        worst < 1e-6 && elapsed < Duration::from_secs(300),
        format!(
            "max beyond-band ratio {worst:.2e} (unfloored {literal_worst:.2e}), {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3(kernels: &[Kernel]) -> Outcome {
    let xs = periodic_corpus(NormIndex::TWO);
    let mut worst = 0.0f64;
    for k in [1usize, 3] {
        let s = Smoother::new(&kernels[k - 1], k);
        for (_, x) in &xs {
            for r in [1.0, 8.0, 64.0] {
                let a = s.smooth_route(x, r, Route::TimeQuadrature).unwrap();
                let b = s.smooth_route(x, r, Route::Multiplier).unwrap();
                worst = worst.max(a.sub(&b).unwrap().norm() / x.norm());
            }
        }
    }
    outcome(worst < 1e-6, format!("max ||time - multiplier|| / ||x|| = {worst:.2e}"))
}

fn criterion_4(kernels: &[Kernel]) -> Outcome {
    let xs = periodic_corpus(NormIndex::TWO);
    let grid = etj_core::numeric::geometric_grid(1.0, 64.0, 13);
    let (mut rows, mut chain, mut lower) = (0, 0, 0);
    let mut tightest = 0.0f64;
    for (k, kernel) in kernels.iter().enumerate().map(|(i, k)| (i + 1, k)) {
        let s = Smoother::new(kernel, k);
        let c = constant_estimate(kernel, k, &GroupDescriptor::Periodic).unwrap();
        let opts = JacksonOptions {
            with_smoothing: true,
            ..Default::default()
        };
        for (_, x) in &xs {
            let rep = jackson_check(x, &grid, &s, &opts).unwrap();
            let tol = 1e-12 * x.norm();
            for row in &rep.rows {
                rows += 1;
                let err = row.smoothing_error.unwrap();
                let exact = parseval_tail(x, row.r);
                if err <= c * row.modulus + tol {
                    chain += 1;
                }
                if exact <= err + tol {
                    lower += 1;
                }
                if row.modulus > tol {
                    tightest = tightest.max(err / (c * row.modulus));
                }
            }
        }
    }
    outcome(
        chain == rows && lower == rows,
        format!("chain {chain}/{rows}, E_exact <= smoothing error {lower}/{rows}, max err/(C omega) = {tightest:.3}"),
    )
}

fn criterion_5(kernel: &Kernel) -> Outcome {
    let s = Smoother::new(kernel, 1);
    let grid = etj_core::numeric::geometric_grid(1.0, 64.0, 13);
    let mut ok = true;
    let mut parts = Vec::new();
    for name in [CorpusName::AbsSin, CorpusName::Sawtooth] {
        for p in [NormIndex::TWO, NormIndex::INF] {
            let x = corpus::periodic(name, N, p, SEED).unwrap();
            let rep = jackson_check(&x, &grid, &s, &JacksonOptions::default()).unwrap();
            let sup = |hi: f64| {
                rep.rows
                    .iter()
                    .filter(|r| r.r <= hi * (1.0 + 1e-12))
                    .map(|r| r.ratio)
                    .fold(0.0, f64::max)
            };
            let (all, low) = (sup(64.0), sup(8.0));
            let pass = all.is_finite() && all <= 4.0 * low;
            ok &= pass;
            parts.push(format!("{name} p={} [{}]: {all:.3}/{low:.3}", p.label(), rep.rows[0].method));
        }
    }
    outcome(ok, parts.join(", "))
}

fn criterion_6(kernel3: &Kernel) -> Outcome {
    let x = corpus::periodic(CorpusName::RandomTrig, N, NormIndex::TWO, SEED).unwrap();
    let grid = etj_core::numeric::geometric_grid(4.0, 64.0, 9);
    let (lr, le): (Vec<f64>, Vec<f64>) = grid.iter().map(|&r| (r.ln(), parseval_tail(&x, r).ln())).unzip();
    let fitted = slope(&lr, &le);
    let lib = best_approx(&x, 16.0, Method::ExactL2, None).unwrap().value;
    let agrees = (lib - parseval_tail(&x, 16.0)).abs() <= 1e-12 * lib;
    let mut ok = (-3.8..=-3.1).contains(&fitted) && agrees;
    let mut parts = vec![format!("slope {fitted:.3}")];
    let s = Smoother::new(kernel3, 1);
    let full = etj_core::numeric::geometric_grid(1.0, 64.0, 13);
    for m in [1usize, 2] {
        let rep = jackson_derivative_check(&x, m, &full, &s, &JacksonOptions::default()).unwrap();
        let d = rep.derivative.unwrap();
        let max = rep
            .rows
            .iter()
            .map(|r| r.e_r * r.r.powi(m as i32) / d.derivative_norm)
            .fold(0.0, f64::max);
        let c = constant_estimate(kernel3, m, &GroupDescriptor::Periodic).unwrap();
        ok &= max.is_finite() && max <= c;
        parts.push(format!("m={m}: sup E_r r^m/||A^m x|| = {max:.3e} (m_m estimate {c:.3e})"));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_7() -> Outcome {
    let ts = etj_core::numeric::geometric_grid(1.0 / 64.0, 1.0, 7);
    let mut gap2 = 0.0f64;
    let mut scaling = 0;
    let mut zero = true;
    let mut parts = Vec::new();
    for p in [NormIndex::ONE, NormIndex::TWO, NormIndex::INF] {
        let mut gap_p = 0.0f64;
        for (_, x) in periodic_corpus(p) {
            for k in [1usize, 2] {
                let rep = modulus_properties_check(&x, k, &ts).unwrap();
                scaling += rep.scaling_violations;
                zero &= rep.zero_at_origin && modulus(&x, 0.0, k, true, DEFAULT_N_TAU).unwrap().value == 0.0;
                gap_p = gap_p.max(rep.max_symmetric_gap);
            }
        }
        if p == NormIndex::TWO {
            gap2 = gap_p;
        }
        parts.push(format!("p={}: max |omega-omega~|/omega~ = {gap_p:.2e}", p.label()));
    }
    parts.push(format!("scaling violations {scaling}, omega~(0)=0: {zero}"));
    outcome(gap2 <= 1e-10 && scaling == 0 && zero, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let mu = make_weight(WeightKind::ExpPower { exponent: 0.5 }).unwrap();
    let grid = LineGrid::new(16.0, 4096, mu.clone()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [NormIndex::ONE, NormIndex::TWO] {
        let x = corpus::line(CorpusName::Bump, grid.clone(), p).unwrap();
        let pf = p.value();
        let mass = simpson(|s| corpus::unit_bump(s).powf(pf), 0.0, 1.0, 20_000).powf(1.0 / pf);
        let norm = x.norm();
        let (mut upper, mut lower) = (0.0f64, f64::INFINITY);
        for i in 0..=40 {
            let t = 0.1 * i as f64;
            let ut = x.shift(t).unwrap().norm();
            upper = upper.max(ut / (mu.value(t) * norm));
            if t > 1.0 {
                lower = lower.min(ut / (mu.value(t - 1.0) * mass));
            }
        }
        let pass = upper <= 1.0 + 1e-6 && lower >= 1.0;
        ok &= pass;
        parts.push(format!(
            "p={}: max ||U(t)x||/(mu(t)||x||) = {upper:.6}, min ||U(t)x||/(mu(t-1) mass) = {lower:.4}",
            p.label()
        ));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config
        .apply_text(&format!(
            "corpus = sawtooth,random-trig\nk = 1,2\nm = 1\nr_grid = 1:32:6\nn_samples = 1024\nseed = 7\nout = {}\n",
            dir.path().display()
        ))
        .unwrap();
    let read = || -> Vec<Vec<u8>> {
        ["jackson.csv", "modulus.csv", "summary.json"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect()
    };
    run_experiment(&config).unwrap();
    let first = read();
    run_experiment(&config).unwrap();
    let second = read();
    let bytes: usize = first.iter().map(Vec::len).sum();
    outcome(first == second, format!("{bytes} bytes across 3 files compared"))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let kernels: Vec<Kernel> = (1..=3).map(unit_kernel).collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("kernel certification", Box::new(criterion_1)),
        ("band limit", Box::new(|| criterion_2(&kernels))),
        ("time quadrature vs multiplier", Box::new(|| criterion_3(&kernels))),
        ("smoothing chain", Box::new(|| criterion_4(&kernels))),
        ("ratio boundedness", Box::new(|| criterion_5(&kernels[0]))),
        ("derivative decay order", Box::new(|| criterion_6(&kernels[2]))),
        ("moduli properties", Box::new(criterion_7)),
        ("weighted line backend", Box::new(criterion_8)),
        ("determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("[{}] {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
