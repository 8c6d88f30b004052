//! Sequential against rayon execution for the three data-parallel stages:
//! exhaustive clustering search, decoding restarts, and whole-instance
//! solves over a batch of grids.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use planar_cc::oracle::brute_cc_with;
use planar_cc::{
    best_decode, gen_grid, gen_random_planar, optimize_lower_bound, solve_instance, DecodeOptions, Execution,
    SolveOptions, WeightModel,
};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn exhaustive_search(c: &mut Criterion) {
    let inst = gen_random_planar(11, 3).unwrap();
    let mut group = c.benchmark_group("brute_cc_11_vertices");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(label, |b| b.iter(|| brute_cc_with(&inst.graph, black_box(&inst.theta), exec).unwrap()));
    }
    group.finish();
}

fn decode_restarts(c: &mut Criterion) {
    let inst = gen_grid(30, 30, WeightModel::GpbLike { beta: 0.27 }, 2).unwrap();
    let bound = optimize_lower_bound(&inst.graph, &inst.theta, 1e-6).unwrap();
    let mut group = c.benchmark_group("best_decode_30x30");
    group.sample_size(10);
    for (label, exec) in MODES {
        let options = DecodeOptions { restarts: 16, execution: exec, ..DecodeOptions::default() };
        group.bench_function(label, |b| {
            b.iter(|| best_decode(&inst.graph, black_box(&inst.theta), &bound, &options).unwrap())
        });
    }
    group.finish();
}

fn instance_batch(c: &mut Criterion) {
    let batch: Vec<_> =
        (0..8).map(|seed| gen_grid(15, 15, WeightModel::GpbLike { beta: 0.27 }, seed).unwrap()).collect();
    let mut group = c.benchmark_group("solve_batch_8x15x15");
    group.sample_size(10);
    for (label, exec) in MODES {
        let options = SolveOptions { execution: exec, ..SolveOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(label), &batch, |b, batch| {
            b.iter(|| exec.map(batch, |inst| solve_instance(&inst.graph, &inst.theta, &options).unwrap().decode.energy))
        });
    }
    group.finish();
}

criterion_group!(benches, exhaustive_search, decode_restarts, instance_batch);
criterion_main!(benches);
