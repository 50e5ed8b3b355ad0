use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hasse_weil::arith::primes_up_to;
use hasse_weil::curve::{minimal_model, WeierstrassCurve};
use hasse_weil::local::{ap_minimal, CountConfig};
use hasse_weil::lseries::{euler_factors, EulerFactor};
use hasse_weil::par::{map_par, map_seq, pairwise_sum};
use num_complex::Complex64;

fn e37() -> WeierstrassCurve {
    WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap()
}

fn ap_table(c: &mut Criterion) {
    let (min, _) = minimal_model(&e37()).unwrap();
    let cfg = CountConfig::bulk();
    let mut group = c.benchmark_group("ap_table");
    group.sample_size(10);
    for p_max in [20_000u64, 100_000] {
        let primes: Vec<u64> = primes_up_to(p_max).into_iter().filter(|&p| p != 37).collect();
        group.bench_with_input(BenchmarkId::new("sequential", p_max), &primes, |b, ps| {
            b.iter(|| map_seq(ps, |&p| ap_minimal(&min, p, &cfg).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("parallel", p_max), &primes, |b, ps| {
            b.iter(|| map_par(ps, |&p| ap_minimal(&min, p, &cfg).unwrap()))
        });
    }
    group.finish();
}

/// `log` of the Euler product, one block of factors per task.
fn euler_log(factors: &[EulerFactor], s: Complex64, parallel: bool) -> Complex64 {
    let blocks: Vec<&[EulerFactor]> = factors.chunks(4096).collect();
    let block_sum = |blk: &&[EulerFactor]| {
        let logs = blk.iter().map(|f| f.eval((-s * (f.p as f64).ln()).exp()).ln()).collect();
        pairwise_sum(logs, Complex64::new(0.0, 0.0))
    };
    let partial = if parallel { map_par(&blocks, block_sum) } else { map_seq(&blocks, block_sum) };
    pairwise_sum(partial, Complex64::new(0.0, 0.0))
}

fn euler_product(c: &mut Criterion) {
    let (factors, _) = euler_factors(&e37(), 1_000_000).unwrap();
    let s = Complex64::new(2.0, 1.0);
    let mut group = c.benchmark_group("euler_product_1e6");
    group.sample_size(20);
    group.bench_function("sequential", |b| b.iter(|| euler_log(black_box(&factors), s, false)));
    group.bench_function("parallel", |b| b.iter(|| euler_log(black_box(&factors), s, true)));
    group.finish();
}

criterion_group!(benches, ap_table, euler_product);
criterion_main!(benches);
