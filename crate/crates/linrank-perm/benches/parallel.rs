use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linrank_matrix::{build_matrix, ScoreMatrix};
use linrank_perm::{
    coupling_mc_batch, coupling_mc_batch_seq, exact_distribution, exact_distribution_seq,
    mc_distribution, mc_distribution_seq,
};

fn bench_matrix(n: usize) -> ScoreMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ((i * n + j) as f64 * 0.9301 + 0.4).sin() * 2.0)
                .collect()
        })
        .collect();
    build_matrix(&rows).unwrap()
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_distribution");
    for n in [8usize, 9] {
        let m = bench_matrix(n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &m, |b, m| {
            b.iter(|| exact_distribution(m, true).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| {
            b.iter(|| exact_distribution_seq(m, true).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_distribution");
    let m = bench_matrix(12);
    for draws in [100_000u64, 400_000] {
        group.bench_with_input(BenchmarkId::new("parallel", draws), &draws, |b, &d| {
            b.iter(|| mc_distribution(&m, d, 7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", draws), &draws, |b, &d| {
            b.iter(|| mc_distribution_seq(&m, d, 7).unwrap())
        });
    }
    group.finish();
}

fn coupling(c: &mut Criterion) {
    let mut group = c.benchmark_group("coupling_mc_batch");
    let m = bench_matrix(7);
    let draws = 100_000u64;
    group.bench_function("parallel", |b| {
        b.iter(|| coupling_mc_batch(&m, draws, 7).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| coupling_mc_batch_seq(&m, draws, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, enumeration, monte_carlo, coupling);
criterion_main!(benches);
