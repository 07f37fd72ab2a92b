use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qpdno::bvp::{ModeBvp, ModeSolver};
use qpdno::chebyshev::ChebyshevBasis;
use qpdno::hops::{expand, Algorithm};
use qpdno::summation::{sum_expansion, Summation};
use qpdno::Complex64;
use qpdno_bench::problem_2d;

fn expansions(c: &mut Criterion) {
    let mut group = c.benchmark_group("expansion_2d_32x32_order8");
    group.sample_size(10);
    let problem = problem_2d(32, 8, 0.1, 0.1, 16);
    for alg in [Algorithm::OeAdjoint, Algorithm::Fe, Algorithm::Tfe] {
        group.bench_with_input(BenchmarkId::from_parameter(alg), &alg, |b, alg| {
            b.iter(|| expand(black_box(&problem), *alg).unwrap())
        });
    }
    group.finish();
}

fn mode_solve(c: &mut Criterion) {
    let solver = ModeSolver::new(ChebyshevBasis::new(32, 0.1).unwrap());
    let bvp = ModeBvp::homogeneous(7.5, Complex64::new(1.0, -0.5), Complex64::new(0.0, 0.0));
    c.bench_function("mode_solve_ny32", |b| b.iter(|| solver.solve(black_box(&bvp)).unwrap()));
}

fn summation(c: &mut Criterion) {
    let e = expand(&problem_2d(32, 16, 0.5, 0.1, 16), Algorithm::Fe).unwrap();
    let mut group = c.benchmark_group("sum_32x32_order16");
    for s in [Summation::Taylor, Summation::Pade] {
        group.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, s| {
            b.iter(|| sum_expansion(black_box(&e), 16, 0.5, *s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, expansions, mode_solve, summation);
criterion_main!(benches);
