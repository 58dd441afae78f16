use criterion::{BenchmarkId, Criterion, Throughput};
use rand::Rng;
use robustmix::{
    dct2d, flop_estimate, low_pass, make_plan, robustmix_batch, AugmentConfig, Policy, RngState,
    Tensor,
};

pub fn random_tensor(dims: Vec<usize>, seed: u64) -> Tensor {
    let mut rng = RngState::new(seed);
    let len = dims.iter().product();
    Tensor::new(dims, (0..len).map(|_| rng.random::<f32>()).collect()).unwrap()
}

pub fn benchmarks(c: &mut Criterion) {
    let mut group = c.benchmark_group("dct2d");
    for n in [32, 64, 224] {
        let plan = make_plan(n).unwrap();
        let x = random_tensor(vec![n, n], 1);
        // two of the six products in the per-plane MAC model
        group.throughput(Throughput::Elements(flop_estimate(n, n, 1) / 3));
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| dct2d(x, &plan, &plan).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("low_pass");
    group.sample_size(20);
    for n in [32, 224] {
        let plan = make_plan(n).unwrap();
        let x = random_tensor(vec![8, n, n, 3], 2);
        group.throughput(Throughput::Elements(8));
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| low_pass(x, 0.5, &plan).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("robustmix_batch");
    group.sample_size(20);
    for n in [32, 224] {
        let x = random_tensor(vec![8, n, n, 3], 3);
        let y = Tensor::one_hot(&[0, 1, 2, 3, 4, 5, 6, 7], 8).unwrap();
        let cfg = AugmentConfig::new(Policy::Robustmix, 0.2);
        let mut rng = RngState::new(4);
        group.throughput(Throughput::Elements(8));
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| robustmix_batch(x, &y, &cfg, &mut rng).unwrap())
        });
    }
    group.finish();
}
