use autloop_bench::{model, CP3, S2, S2XS3, SU3};
use autloop_core::exactq;
use autloop_core::freeloop::hodge_betti_table;
use autloop_core::pdquotient::structure_identities;
use autloop_core::sections::verify_theorems;
use autloop_core::{build_free_loop_model, build_quotient};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn rref_of_loop_slices(c: &mut Criterion) {
    let flm = build_free_loop_model(&model(S2XS3)).unwrap();
    let mut group = c.benchmark_group("rref loop slice");
    for n in [8u32, 12, 16] {
        let m = flm.full_slice_matrix(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| exactq::rref(black_box(m)))
        });
    }
    group.finish();
}

fn hodge_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("hodge table");
    for (name, text, n) in [("S2", S2, 16u32), ("CP3", CP3, 14), ("SU3", SU3, 20)] {
        let flm = build_free_loop_model(&model(text)).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| hodge_betti_table(black_box(&flm), n).unwrap())
        });
    }
    group.finish();
}

fn quotient_and_identities(c: &mut Criterion) {
    let m = model(S2XS3);
    c.bench_function("quotient S2xS3", |b| {
        b.iter(|| build_quotient(black_box(&m)).unwrap())
    });
    let (a, _) = build_quotient(&m).unwrap();
    c.bench_function("structure identities S2xS3", |b| {
        b.iter(|| structure_identities(black_box(&a)).unwrap())
    });
}

fn full_verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify theorems");
    group.sample_size(10);
    for (name, text) in [("CP3", CP3), ("S2xS3", S2XS3)] {
        let m = model(text);
        let n = m.formal_dimension() + 8;
        group.bench_function(name, |b| {
            b.iter(|| verify_theorems(black_box(&m), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    rref_of_loop_slices,
    hodge_tables,
    quotient_and_identities,
    full_verification
);
criterion_main!(benches);
