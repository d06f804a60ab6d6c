//! Compares the rayon-backed batch map against the sequential fallback on a
//! realistic workload: reward evaluation of a batch of random genomes, as
//! performed every grid iteration.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symreg::expr::{random_expression, Expression, GenConfig, ScalarMode};
use symreg::fitness::{cost, reward, Dataset};
use symreg::par::{map_batch, map_batch_serial};

fn workload(n: usize) -> (Vec<Expression>, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cfg = GenConfig {
        max_len: 25,
        max_nested: 1,
        n_vars: 1,
        mode: ScalarMode::IntegerScalars,
    };
    let exprs = (0..n).map(|_| random_expression(&cfg, &mut rng)).collect();
    let points: Vec<[f64; 3]> = (0..100).map(|i| [i as f64 / 99.0, 0.0, 0.0]).collect();
    let data = Dataset::from_oracle(1, points, |p| {
        p[0] + p[0].powi(2) + p[0].powi(3) + p[0].powi(4)
    });
    (exprs, data)
}

fn bench_batch_reward(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_reward");
    for n in [64usize, 512, 2048] {
        let (exprs, data) = workload(n);
        let score = |e: &Expression| reward(cost(e, &[], &data), &data);
        group.bench_with_input(BenchmarkId::new("parallel", n), &exprs, |b, exprs| {
            b.iter(|| map_batch(exprs, score))
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &exprs, |b, exprs| {
            b.iter(|| map_batch_serial(exprs, score))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_batch_reward);
criterion_main!(benches);
