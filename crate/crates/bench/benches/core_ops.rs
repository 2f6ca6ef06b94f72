use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wknot_core::alexander::alexander_poly;
use wknot_core::arrows::{graded_dimension, EnumerationCaps, Skeleton, SpaceKind};
use wknot_core::atspaces::{bch, LieElement};
use wknot_core::expansions::{braid_z_log, knot_z};
use wknot_core::knots::{parse_gauss_code, BraidWord};
use wknot_core::kv::solve_kv_full;
use wknot_core::linalg::RankMode;

fn bench_dimensions(c: &mut Criterion) {
    let caps = EnumerationCaps::default();
    c.bench_function("graded_dimension w line 4", |b| {
        b.iter(|| {
            graded_dimension(
                Skeleton::LongLine,
                SpaceKind::W,
                black_box(4),
                RankMode::ModularCertified,
                &caps,
            )
            .unwrap()
        })
    });
    c.bench_function("graded_dimension v line 3", |b| {
        b.iter(|| {
            graded_dimension(
                Skeleton::LongLine,
                SpaceKind::V,
                black_box(3),
                RankMode::ModularCertified,
                &caps,
            )
            .unwrap()
        })
    });
}

fn bench_alexander(c: &mut Criterion) {
    let k = parse_gauss_code("U1- O2- U3- O4- U5+ O6+ U2- O3- U7+ O8+ U4- O1- U6+ O7+ U8+ O5+")
        .unwrap();
    c.bench_function("alexander_poly 8 crossings", |b| {
        b.iter(|| alexander_poly(black_box(&k)))
    });
}

fn bench_bch(c: &mut Criterion) {
    let x = LieElement::gen(2, 0, 6);
    let y = LieElement::gen(2, 1, 6);
    c.bench_function("bch degree 6", |b| {
        b.iter(|| bch(black_box(&x), black_box(&y), 6))
    });
}

fn bench_expansions(c: &mut Criterion) {
    let k = parse_gauss_code("O1+ U2+ O3+ U1+ O2+ U3+").unwrap();
    c.bench_function("knot_z trefoil degree 4", |b| {
        b.iter(|| knot_z(black_box(&k), 4))
    });
    let w = BraidWord::parse(3, "p1 p2 p1").unwrap();
    c.bench_function("braid_z_log 3 letters degree 5", |b| {
        b.iter(|| braid_z_log(black_box(&w), 5))
    });
}

fn bench_kv(c: &mut Criterion) {
    let mut g = c.benchmark_group("kv");
    g.sample_size(10);
    g.bench_function("solve_kv_full degree 3", |b| {
        b.iter(|| solve_kv_full(black_box(3)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_dimensions,
    bench_alexander,
    bench_bch,
    bench_expansions,
    bench_kv
);
criterion_main!(benches);
