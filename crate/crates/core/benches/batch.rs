//! Batch decomposition: rayon fan-out vs. the sequential loop.
//!
//! `cargo bench -p polybase --bench batch`; with `--no-default-features` both
//! arms run sequentially, which is a useful baseline for the overhead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polybase::batch::{decompose_batch, decompose_batch_sequential, Job};
use polybase::corpus::{rng, sample_target, standard_corpus};
use rand::Rng;

fn jobs(max_n: usize, per_instance: usize) -> Vec<Job> {
    let mut r = rng(7);
    standard_corpus(7)
        .into_iter()
        .filter(|inst| inst.f.n() <= max_n)
        .flat_map(|inst| {
            (0..per_instance)
                .map(|_| {
                    let k = r.gen_range(1..=12);
                    let w = sample_target(&inst.f, k, &mut r);
                    Job { f: inst.f.clone(), w, k }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose_batch");
    group.sample_size(10);
    for max_n in [5, 8] {
        let jobs = jobs(max_n, 2);
        group.bench_with_input(BenchmarkId::new("parallel", max_n), &jobs, |b, jobs| {
            b.iter(|| decompose_batch(jobs))
        });
        group.bench_with_input(BenchmarkId::new("sequential", max_n), &jobs, |b, jobs| {
            b.iter(|| decompose_batch_sequential(jobs))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
