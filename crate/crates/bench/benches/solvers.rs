use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use abdirac_bench::{bench_grid, bench_params};
use abdirac_core::*;

fn bench_form_evaluation(c: &mut Criterion) {
    let params = bench_params();
    let grid = bench_grid(&params);
    let eta = make_eta_star(&params, &grid).unwrap();
    let lambda = params.ground_state_energy().unwrap();
    c.bench_function("eval_j_mode eta* n=2000", |b| {
        b.iter(|| eval_j_mode(black_box(&eta), &params, lambda, 0).unwrap())
    });
    let ev = JModeEvaluator::new(&eta, &params, 0).unwrap();
    c.bench_function("precomputed J sweep", |b| {
        b.iter(|| ev.eval(black_box(0.3)).unwrap())
    });
}

fn bench_quadrature(c: &mut Criterion) {
    let params = bench_params();
    let grid = bench_grid(&params);
    let eta = make_eta_star(&params, &grid).unwrap();
    c.bench_function("integrate_weighted coulomb", |b| {
        b.iter(|| integrate_weighted(black_box(&eta), -2.0 * params.a(), None).unwrap())
    });
}

fn bench_lambda_star(c: &mut Criterion) {
    let params = bench_params();
    let grid = bench_grid(&params);
    let eta = make_eta_star(&params, &grid).unwrap();
    c.bench_function("lambda_star bisection", |b| {
        b.iter(|| lambda_star_default(black_box(&eta), &params).unwrap())
    });
}

fn bench_eigensolvers(c: &mut Criterion) {
    let params = bench_params();
    let grid = bench_grid(&params);
    c.bench_function("form bisection eigenvalue", |b| {
        b.iter(|| lowest_gap_eigenvalue_form(&params, black_box(0), &grid).unwrap())
    });
    c.bench_function("shooting eigenvalue", |b| {
        b.iter(|| eigensolve_shooting(&params, black_box(0), &grid).unwrap())
    });
}

criterion_group! {
    name = solvers;
    config = Criterion::default().sample_size(10);
    targets = bench_form_evaluation, bench_quadrature, bench_lambda_star, bench_eigensolvers
}
criterion_main!(solvers);
