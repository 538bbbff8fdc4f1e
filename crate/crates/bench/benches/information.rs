use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcrb_core::linalg::eigh;
use qcrb_core::models::{DerivOptions, SpectralMixtureModel};
use qcrb_core::quantum::{helstrom_info_sld, relation_report};
use qcrb_core::StateModel;

fn spectral(n: usize) -> StateModel {
    StateModel::spectral(format!("bench-{n}"), SpectralMixtureModel::random(n, 7))
}

fn bench_eigh(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigh");
    for n in [2, 4, 8, 16] {
        let rho = spectral(n).rho_at(0.3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &rho, |b, rho| {
            b.iter(|| eigh(black_box(rho.matrix())).unwrap())
        });
    }
    g.finish();
}

fn bench_sld(c: &mut Criterion) {
    let opts = DerivOptions::default();
    let mut g = c.benchmark_group("helstrom_sld");
    for n in [2, 4, 8] {
        let m = spectral(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| helstrom_info_sld(m, black_box(0.3), &opts).unwrap())
        });
    }
    g.finish();
}

fn bench_report(c: &mut Criterion) {
    let opts = DerivOptions::default();
    let mut g = c.benchmark_group("relation_report");
    for n in [2, 4, 6] {
        let m = spectral(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| relation_report(m, black_box(0.3), &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_eigh, bench_sld, bench_report);
criterion_main!(benches);
