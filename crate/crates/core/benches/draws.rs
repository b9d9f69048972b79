use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pwl_expressivity::{
    estimate_ratio_curve, min_fineness_search, Activation, EpsilonGrid, FinenessSearchConfig, NetworkShape, RatioConfig, TargetFunction,
    Workers,
};

fn ratio_draws(c: &mut Criterion) {
    let shape = NetworkShape::new(1, vec![4, 4, 4, 4, 4, 1]).unwrap();
    let target = TargetFunction::Sin4Pi;
    let cfg = RatioConfig {
        grid_count: 2_000,
        theta_draws: 400,
        epsilon: EpsilonGrid::SIN_DEFAULT.resampled(100),
        ..RatioConfig::default_for(&target, 1)
    };
    let mut group = c.benchmark_group("ratio_draws");
    group.sample_size(10);
    for (name, workers) in [("sequential", Workers::SEQUENTIAL), ("parallel", Workers::ALL)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &workers, |b, &w| {
            b.iter(|| estimate_ratio_curve(&shape, &Activation::Relu, &target, &cfg, w).unwrap())
        });
    }
    group.finish();
}

fn fineness_draws(c: &mut Criterion) {
    let shape = NetworkShape::new(1, vec![20, 1]).unwrap();
    let cfg = FinenessSearchConfig { draws: 100, grid_count: 10_000, ..FinenessSearchConfig::with_seed(1) };
    let mut group = c.benchmark_group("fineness_draws");
    group.sample_size(10);
    for (name, workers) in [("sequential", Workers::SEQUENTIAL), ("parallel", Workers::ALL)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &workers, |b, &w| {
            b.iter(|| min_fineness_search(&shape, &Activation::Relu, &cfg, w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ratio_draws, fineness_draws);
criterion_main!(benches);
