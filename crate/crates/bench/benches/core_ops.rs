use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ecbound_bench::fixture_curves;
use ecbound_core::arithmetic::{factor, FactorBudget};
use ecbound_core::curve::{rat_i64, CurvePoint};
use ecbound_core::enumerate::{enumerate_by_x_height, EnumerationBudget};
use ecbound_core::heights::CanonicalHeightCtx;
use ecbound_core::local::global_invariants;
use ecbound_core::torsion::{division_polynomial, torsion_subgroup};

fn bench_canonical_height(c: &mut Criterion) {
    let fb = FactorBudget::default();
    let curve = ecbound_core::curve::WeierstrassCurve::parse("0,-16,16").unwrap();
    let ctx = CanonicalHeightCtx::new(&curve, &fb).unwrap();
    let p = CurvePoint::affine(rat_i64(0), rat_i64(4));
    c.bench_function("canonical_height tol 1e-9", |b| {
        b.iter(|| ctx.height(black_box(&p), 1e-9).unwrap())
    });
    c.bench_function("canonical_height ctx build", |b| {
        b.iter(|| CanonicalHeightCtx::new(black_box(&curve), &fb).unwrap())
    });
}

fn bench_tate(c: &mut Criterion) {
    let fb = FactorBudget::default();
    let curves = fixture_curves();
    c.bench_function("global_invariants fixture set", |b| {
        b.iter(|| {
            for e in &curves {
                black_box(global_invariants(e, &fb).unwrap());
            }
        })
    });
}

fn bench_factor(c: &mut Criterion) {
    let fb = FactorBudget::default();
    let n = num_bigint::BigInt::from(151552u64) * num_bigint::BigInt::from(999983u64);
    c.bench_function("factor desk-scale integer", |b| {
        b.iter(|| factor(black_box(&n), &fb).unwrap())
    });
}

fn bench_torsion(c: &mut Criterion) {
    let fb = FactorBudget::default();
    let curve = ecbound_core::curve::WeierstrassCurve::parse("0,0,1").unwrap();
    c.bench_function("torsion_subgroup 36a", |b| {
        b.iter(|| torsion_subgroup(black_box(&curve), &fb).unwrap())
    });
    c.bench_function("division_polynomial psi_9", |b| {
        b.iter(|| division_polynomial(black_box(&curve), 9).unwrap())
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let fb = FactorBudget::default();
    let eb = EnumerationBudget::default();
    let curve = ecbound_core::curve::WeierstrassCurve::parse("0,-16,16").unwrap();
    let mut group = c.benchmark_group("x_scan");
    group.sample_size(10);
    group.bench_function("radius 1e4", |b| {
        b.iter(|| enumerate_by_x_height(black_box(&curve), 1e4, &eb, &fb).unwrap())
    });
    group.bench_function("radius 1e5", |b| {
        b.iter(|| enumerate_by_x_height(black_box(&curve), 1e5, &eb, &fb).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_canonical_height,
    bench_tate,
    bench_factor,
    bench_torsion,
    bench_enumeration
);
criterion_main!(benches);
