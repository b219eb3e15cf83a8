//! Bulk disc extraction: the feature-dispatched entry point (rayon when the
//! `parallel` feature is on, the default) against the always-sequential
//! implementation, over a few graph shapes, plus the frequency-vector
//! builder that sits on top of it.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use disc_kit::disc::{disc_fingerprints, disc_fingerprints_seq};
use disc_kit::freq::freq_k;
use disc_kit::gen;
use disc_kit::sgraph::VertexId;

fn bulk_discs(c: &mut Criterion) {
    let mut group = c.benchmark_group("bulk_discs");
    for &(n, d, k) in &[(200usize, 3usize, 1u32), (200, 3, 2), (2000, 2, 1)] {
        let mut rng = gen::rng_from_seed(7);
        let g = gen::random_sgraph(&mut rng, n, d, &gen::symbols(2));
        let verts: Vec<VertexId> = (0..n as VertexId).collect();
        let label = format!("n{n}_d{d}_k{k}");
        group.bench_function(BenchmarkId::new("dispatch", &label), |b| {
            b.iter(|| disc_fingerprints(&g, k, &verts))
        });
        group.bench_function(BenchmarkId::new("sequential", &label), |b| {
            b.iter(|| disc_fingerprints_seq(&g, k, &verts))
        });
    }
    group.finish();
}

fn freq_vectors(c: &mut Criterion) {
    let mut group = c.benchmark_group("freq_vectors");
    for &(n, k) in &[(500usize, 1u32), (500, 2)] {
        let mut rng = gen::rng_from_seed(11);
        let g = gen::random_sgraph(&mut rng, n, 3, &gen::symbols(1));
        group.bench_function(BenchmarkId::new("freq_k", format!("n{n}_k{k}")), |b| {
            b.iter(|| freq_k(&g, k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bulk_discs, freq_vectors);
criterion_main!(benches);
