//! Parallel versus sequential evaluation of the sampled checkers.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dfb_core::dfell::{check_double_star_axioms, DoubleFellBundle};
use dfb_core::dual::{check_dual, dual_category};
use dfb_core::fell::{check_fell_axioms, FellBundle};
use dfb_core::gns::{check_gns, gns_full, State};
use dfb_core::groupoid::DoubleGroupoid;
use dfb_core::Exec;

const SAMPLES: usize = 100;
const TOL: f64 = 1e-9;
const SEED: u64 = 42;
const PATHS: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn fell_axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fell_axioms");
    for dims in [vec![2, 2], vec![2, 2, 2, 2], vec![1, 2, 3, 4]] {
        let b = FellBundle::pair(&dims).unwrap();
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, format!("{dims:?}")), &b, |bench, b| {
                bench.iter(|| black_box(check_fell_axioms(b, SAMPLES, TOL, SEED, exec)))
            });
        }
    }
    group.finish();
}

fn double_axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("double_axioms");
    for dim in [1, 2] {
        let b = DoubleFellBundle::uniform(DoubleGroupoid::grid(2, 2, true).unwrap(), dim).unwrap();
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, format!("2x2 dim {dim}")), &b, |bench, b| {
                bench.iter(|| black_box(check_double_star_axioms(b, SAMPLES, TOL, SEED, exec)))
            });
        }
    }
    group.finish();
}

fn gns(c: &mut Criterion) {
    let mut group = c.benchmark_group("gns");
    let b = FellBundle::pair(&[2, 2, 2]).unwrap();
    let rep = gns_full(&b, &State::normalized_trace(&b, 0).unwrap(), 1e-12).unwrap();
    for (name, exec) in PATHS {
        group.bench_function(name, |bench| bench.iter(|| black_box(check_gns(&rep, SAMPLES, TOL, SEED, exec))));
    }
    group.finish();
}

fn dual(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual");
    let b = FellBundle::pair(&[2, 2, 2]).unwrap();
    let d = dual_category(&b, TOL).unwrap();
    for (name, exec) in PATHS {
        group.bench_function(name, |bench| bench.iter(|| black_box(check_dual(&d, 1000, TOL, SEED, exec))));
    }
    group.finish();
}

criterion_group!(benches, fell_axioms, double_axioms, gns, dual);
criterion_main!(benches);
