//! Sequential vs rayon-parallel execution of the data-parallel kernels.
//!
//! Run with `cargo bench -p qtype-core`; build with `--no-default-features`
//! to confirm that the parallel rows collapse onto the sequential ones.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qtype_core::exec::Strategy;
use qtype_core::fuzz;
use qtype_core::infer::{infer_with, track_generators, InferConfig};
use qtype_core::oracle::{self, pauli_decompose};
use std::hint::black_box;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn generator_tracking(c: &mut Criterion) {
    let mut group = c.benchmark_group("track_generators");
    group.sample_size(10);
    for n in [8usize, 20] {
        let p = fuzz::clifford_program(&mut fuzz::rng(7), n, 20_000);
        for (label, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(label, n), &p, |b, p| {
                b.iter(|| track_generators(black_box(p), strategy).unwrap())
            });
        }
    }
    group.finish();
}

fn pauli_decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("pauli_decompose");
    group.sample_size(10);
    for n in [4usize, 5] {
        let p = fuzz::clifford_t_program(&mut fuzz::rng(11), n, 40, 3);
        let m = oracle::program_matrix(&p, oracle::DEFAULT_CAP).unwrap();
        for (label, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(label, n), &m, |b, m| {
                b.iter(|| pauli_decompose(black_box(m), strategy).unwrap())
            });
        }
    }
    group.finish();
}

fn wide_inference(c: &mut Criterion) {
    // Several T gates on a wide register: many summands per term, so the
    // per-term gate application dominates.
    let mut group = c.benchmark_group("infer_additive");
    group.sample_size(10);
    let n = 12;
    let p = fuzz::clifford_t_program(&mut fuzz::rng(3), n, 2_000, 6);
    let init = fuzz::all_zero_type(n);
    for (label, strategy) in STRATEGIES {
        let cfg = InferConfig { strategy, ..InferConfig::default() };
        group.bench_function(BenchmarkId::new(label, n), |b| {
            b.iter(|| infer_with(black_box(&p), &init, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, generator_tracking, pauli_decomposition, wide_inference);
criterion_main!(benches);
