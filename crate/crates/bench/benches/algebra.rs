use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_k::lattice::{int_vec, IntMatrix};
use toric_k::{corpus, hilbert_basis, snf, CechComplex, Cone};

fn bench_snf(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("snf");
    for n in [4usize, 8, 12] {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-20..=20)).collect())
            .collect();
        let m = IntMatrix::from_i64_rows(n, &rows);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| snf(black_box(m))));
    }
    group.finish();
}

fn bench_hilbert(c: &mut Criterion) {
    let mut group = c.benchmark_group("hilbert_basis");
    let cones = [
        (
            "A2 dual",
            Cone::from_rays(2, &[int_vec(&[1, 0]), int_vec(&[1, 3])])
                .unwrap()
                .dual(),
        ),
        (
            "(1,0),(1,17) primal",
            Cone::from_rays(2, &[int_vec(&[1, 0]), int_vec(&[1, 17])]).unwrap(),
        ),
        (
            "square cone dual",
            Cone::from_rays(
                3,
                &[
                    int_vec(&[0, 0, 1]),
                    int_vec(&[1, 0, 1]),
                    int_vec(&[0, 1, 1]),
                    int_vec(&[1, 1, 1]),
                ],
            )
            .unwrap()
            .dual(),
        ),
    ];
    for (name, cone) in &cones {
        group.bench_with_input(BenchmarkId::from_parameter(name), cone, |b, c| {
            b.iter(|| hilbert_basis(black_box(c)))
        });
    }
    group.finish();
}

fn bench_solve_coboundary(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_coboundary");
    for (name, level) in [("p2", 1), ("bl1p2", 1), ("p1xp1", 2)] {
        let fan = corpus::fan_by_name(name).unwrap();
        let complex = CechComplex::build(&fan);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = complex.random_cocycle(level, &mut rng);
        group.bench_function(format!("{name} level {level}"), |b| {
            b.iter(|| complex.solve_coboundary(black_box(&z), 3, false).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_snf, bench_hilbert, bench_solve_coboundary);
criterion_main!(benches);
