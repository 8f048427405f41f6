use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use relhyp_bench::{dense_matrix, free_group, free_product_ball_metric, segment_horoball, tree_rips};
use relhyp_core::augmented::{four_point_delta, DeltaMode};
use relhyp_core::rips::{reduced_homology, smith_normal_form};
use relhyp_core::Limits;

fn ball(c: &mut Criterion) {
    let f2 = free_group();
    let mut group = c.benchmark_group("ball");
    for r in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::new("F2", r), &r, |b, &r| {
            b.iter(|| f2.ball(black_box(r), &Limits::default()).unwrap())
        });
    }
    group.finish();
}

fn horoball_bfs(c: &mut Criterion) {
    let h = segment_horoball(256, 8);
    c.bench_function("horoball_bfs/256x8", |b| b.iter(|| h.graph().bfs(black_box(0))));
}

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [6, 12, 20] {
        let m = dense_matrix(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| smith_normal_form(black_box(m))));
    }
    group.finish();
    let complex = tree_rips();
    c.bench_function("reduced_homology/F2_ball3_D2", |b| b.iter(|| reduced_homology(black_box(&complex))));
}

fn four_point(c: &mut Criterion) {
    let d = free_product_ball_metric(2);
    c.bench_function("four_point/Z2*Z2_ball2", |b| {
        b.iter(|| four_point_delta(black_box(&d), DeltaMode::Exhaustive).unwrap())
    });
}

criterion_group!(benches, ball, horoball_bfs, snf, four_point);
criterion_main!(benches);
