use std::sync::Arc;

use etj_core::approximation::{constant_estimate, jackson_check, JacksonOptions, JacksonVerdict, Smoother};
use etj_core::kernel::{build_kernel, KernelSpec};
use etj_core::smoothness::modulus;
use etj_core::space::corpus::{self, CorpusName};
use etj_core::space::{GridFunction, LineGrid, NormIndex};
use etj_core::weight::{alpha_from_group, make_weight, GroupBound, Weight, WeightKind};
use etj_core::Error;

fn mu() -> Weight {
    make_weight(WeightKind::ExpPower { exponent: 0.5 }).unwrap()
}

fn grid() -> Arc<LineGrid> {
    LineGrid::new(16.0, 2048, mu()).unwrap()
}

#[test]
fn smoothing_bump_with_matched_kernel() {
    let alpha = alpha_from_group(GroupBound::Weight { weight: Box::new(mu()) }, 1).unwrap();
    let kernel = build_kernel(&KernelSpec::new(alpha)).unwrap().certify(&[1.0], 0).unwrap();
    let x = corpus::line(CorpusName::Gaussian, grid(), NormIndex::TWO).unwrap();
    let s = Smoother::new(&kernel, 1);
    let c = constant_estimate(&kernel, 1, &x.group()).unwrap();
    assert!((c - 2.0 * kernel.decay_constant(1.0).unwrap()).abs() < 1e-6 * c);
    let errs: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&r| x.sub(&s.smooth(&x, r).unwrap()).unwrap().norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    for (&r, e) in [1.0, 4.0, 16.0].iter().zip(&errs) {
        let w = modulus(&x, 1.0 / r, 1, true, 64).unwrap().value;
        assert!(*e <= c * w);
    }
    let opts = JacksonOptions {
        with_smoothing: true,
        ..Default::default()
    };
    let rep = jackson_check(&x, &[1.0, 2.0, 8.0], &s, &opts).unwrap();
    assert_eq!(rep.verdict, JacksonVerdict::Pass);
    assert!(jackson_check(&x, &[0.5], &s, &opts).is_err());
}

#[test]
fn unit_kernel_is_too_weak_for_unbounded_group() {
    let kernel = build_kernel(&KernelSpec::new(alpha_from_group(GroupBound::Unit, 1).unwrap())).unwrap();
    let x = corpus::line(CorpusName::Bump, grid(), NormIndex::TWO).unwrap();
    assert!(matches!(
        Smoother::new(&kernel, 1).smooth(&x, 2.0),
        Err(Error::BackendMismatch(_))
    ));
}

#[test]
fn window_tail_is_refused() {
    let alpha = alpha_from_group(GroupBound::Weight { weight: Box::new(mu()) }, 1).unwrap();
    let kernel = build_kernel(&KernelSpec::new(alpha)).unwrap();
    let wide = GridFunction::line_from_fn(grid(), NormIndex::TWO, |s| (-(s / 10.0).powi(2)).exp()).unwrap();
    assert!(matches!(
        Smoother::new(&kernel, 1).smooth(&wide, 2.0),
        Err(Error::WindowTail { .. })
    ));
}

#[test]
fn weighted_shift_growth() {
    let g = grid();
    let x = corpus::line(CorpusName::Bump, g, NormIndex::TWO).unwrap();
    let n0 = x.norm();
    let mut prev = n0;
    for i in 1..=8 {
        let t = 0.5 * i as f64;
        let n = x.shift(t).unwrap().norm();
        assert!(n <= mu().value(t) * n0 * (1.0 + 1e-6));
        if t > 1.0 {
            assert!(n > prev);
        }
        prev = n;
    }
    assert!(matches!(x.shift(20.0), Err(Error::ShiftOutOfWindow { .. })));
}
