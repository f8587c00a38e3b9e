use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qrabi_core::models::SectorIndex;
use qrabi_core::operators::{lowest_eigenpairs_with, EigenMethod, EigenOptions};
use qrabi_core::states::{cat_state, CatKind};
use qrabi_core::wigner::wigner_panels;
use qrabi_core::{build_hamiltonian, Complex64, DensityMatrix, ModelId, ModelParams, PlaneSection};

fn eigensolvers(c: &mut Criterion) {
    let params = ModelParams::default();
    let mut group = c.benchmark_group("lowest_10_r2");
    group.sample_size(10);
    for n in [16, 24] {
        let h = build_hamiltonian(ModelId::R2, &params, &ModelId::R2.space(n).unwrap()).unwrap();
        for (name, method) in [("chebyshev", EigenMethod::Chebyshev), ("lanczos", EigenMethod::Lanczos)] {
            let opts = EigenOptions {
                method,
                ..EigenOptions::with_tol(1e-10)
            };
            group.bench_with_input(BenchmarkId::new(name, n), &h, |b, h| {
                b.iter(|| lowest_eigenpairs_with(black_box(h), 10, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn hamiltonian_build(c: &mut Criterion) {
    let params = ModelParams::default();
    let space = ModelId::R2.space(40).unwrap();
    c.bench_function("build_r2_n40", |b| {
        b.iter(|| build_hamiltonian(ModelId::R2, black_box(&params), &space).unwrap())
    });
}

fn wigner_grid(c: &mut Criterion) {
    let k = SectorIndex::new(0).unwrap();
    let rho = DensityMatrix::from_pure(cat_state(CatKind::Q2b, k, Complex64::new(1.0, 0.0), 20).unwrap());
    let coords: Vec<(i64, i64)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    let mut group = c.benchmark_group("wigner");
    group.sample_size(10);
    group.bench_function("q2b_9_panels_21x21", |b| {
        b.iter(|| wigner_panels(black_box(&rho), PlaneSection::diagonal(), 3.0, 21, &coords).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigensolvers, hamiltonian_build, wigner_grid);
criterion_main!(benches);
