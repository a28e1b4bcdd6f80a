use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use privbandit::harness::{run_single, Algorithm};
use privbandit::mechanisms::{lap_sample, LaplaceScale};
use privbandit::rng::{stream, Purpose};
use privbandit::schedules::{dpse_schedule_raw, MomentParams};
use privbandit_bench::{laplace_tree, s1_config};

fn mechanisms(c: &mut Criterion) {
    let scale = LaplaceScale::new(1.0).unwrap();
    let mut rng = stream(2, 0, 0, Purpose::Test);
    c.bench_function("laplace_sample", |b| b.iter(|| lap_sample(black_box(scale), &mut rng)));

    c.bench_function("tree_insert_4096", |b| {
        b.iter_batched(
            || laplace_tree(4096),
            |mut tree| {
                for i in 0..4096u32 {
                    tree.insert(f64::from(i % 3) * 0.25, 1.0).unwrap();
                }
                tree.estimate()
            },
            BatchSize::SmallInput,
        )
    });

    let p = MomentParams::new(8.142, 0.9).unwrap();
    c.bench_function("dpse_schedule", |b| {
        b.iter(|| dpse_schedule_raw(p, black_box(1.0), 1e-5, black_box(7), 5))
    });
}

fn policies(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_10k_rounds");
    group.sample_size(20);
    for algo in Algorithm::ALL {
        let cfg = s1_config(algo, 10_000);
        group.bench_function(algo.name(), |b| b.iter(|| run_single(&cfg, 0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, mechanisms, policies);
criterion_main!(benches);
