use criterion::{criterion_group, criterion_main, Criterion};
use etj_core::approximation::{jackson_check, JacksonOptions, Smoother};
use etj_core::kernel::{build_kernel, Kernel, KernelSpec};
use etj_core::space::corpus::{self, CorpusName};
use etj_core::space::NormIndex;
use etj_core::weight::{alpha_from_group, GroupBound};

fn kernel() -> Kernel {
    build_kernel(&KernelSpec::new(alpha_from_group(GroupBound::Unit, 1).unwrap()))
        .unwrap()
        .certify(&[1.0], 0)
        .unwrap()
}

fn sweep(c: &mut Criterion) {
    let kernel = kernel();
    let x = corpus::periodic(CorpusName::AbsSin, 4096, NormIndex::TWO, 0).unwrap();
    let r_grid: Vec<f64> = (0..16).map(|i| 2f64.powf(i as f64 * 0.4)).collect();
    let opts = JacksonOptions {
        with_smoothing: true,
        ..Default::default()
    };
    let run = || {
        let s = Smoother::new(&kernel, 1);
        jackson_check(&x, &r_grid, &s, &opts).unwrap()
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut g = c.benchmark_group("jackson_sweep");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| single.install(run)));
    g.bench_function("rayon", |b| b.iter(run));
    g.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
