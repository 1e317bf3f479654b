use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gfri_core::{
    analyze, build_hgeswt, factorize_gft, nearest_kronecker_circulant, plan_mrt,
    prony_reconstruct, sample_gft, sample_via_pipeline, CirculantGraph, CoarseningScheme,
    GraphSignal, SparseSignal, C64,
};

fn random_sparse(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SparseSignal {
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(rng);
    let mut support: Vec<usize> = positions[..k].to_vec();
    support.sort_unstable();
    let amplitudes = (0..k)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SparseSignal::new(n, support, amplitudes).unwrap()
}

fn bench_prony(c: &mut Criterion) {
    let mut group = c.benchmark_group("prony_reconstruct");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &(n, k) in &[(32usize, 4usize), (128, 8), (128, 32)] {
        let x = random_sparse(n, k, &mut rng);
        let y = sample_gft(&x, 2 * k).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_k{k}")), &y, |b, y| {
            b.iter(|| prony_reconstruct(y, k).unwrap())
        });
    }
    group.finish();
}

fn bench_filterbank(c: &mut Criterion) {
    let g = CirculantGraph::unweighted(64, &[1, 3, 5]).unwrap();
    let alphas = [2.0 * std::f64::consts::PI * 3.0 / 64.0];
    c.bench_function("build_hgeswt_n64", |b| {
        b.iter(|| build_hgeswt(&g, 2, &alphas).unwrap())
    });
}

fn bench_multires(c: &mut Criterion) {
    let g = CirculantGraph::unweighted(128, &[1]).unwrap();
    let plan = plan_mrt(&g, 2, &[0.0], 3, CoarseningScheme::SameGeneratingSet).unwrap();
    let x = GraphSignal::from_real(&(0..128).map(|i| (i as f64 * 0.1).sin()).collect::<Vec<_>>());
    c.bench_function("analyze_n128_j3", |b| b.iter(|| analyze(&x, &plan).unwrap()));
}

fn bench_pipeline(c: &mut Criterion) {
    let g = CirculantGraph::unweighted(128, &[1, 3, 5]).unwrap();
    let fact = factorize_gft(&g, 6, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = GraphSignal::new(random_sparse(128, 3, &mut rng).dense());
    c.bench_function("sample_via_pipeline_n128", |b| {
        b.iter(|| sample_via_pipeline(&x, &fact).unwrap())
    });
}

fn bench_kronecker_approx(c: &mut Criterion) {
    let a1 = CirculantGraph::unweighted(4, &[1]).unwrap().adjacency();
    let a2 = CirculantGraph::unweighted(8, &[1, 3]).unwrap().adjacency();
    let a = a1.kronecker(&a2);
    c.bench_function("nearest_kronecker_circulant_4x8", |b| {
        b.iter(|| nearest_kronecker_circulant(&a, 4, 8).unwrap())
    });
}

criterion_group!(
    benches,
    bench_prony,
    bench_filterbank,
    bench_multires,
    bench_pipeline,
    bench_kronecker_approx
);
criterion_main!(benches);
