use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use subcrit::classes::ClassName;
use subcrit::singular::{char_solve, growth_system, refine_schedule, Target};
use subcrit::solver::fixed_point;
use subcrit_bench::{labelled, sample, sample_float, unlabelled};

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for n in [16, 64] {
        let (a, b) = (sample(n), sample(n).truncate(n - 1).add(&sample(n - 1)).unwrap());
        g.bench_with_input(BenchmarkId::new("mul_exact", n), &n, |bn, _| bn.iter(|| black_box(a.mul(&b).unwrap())));
        g.bench_with_input(BenchmarkId::new("exp_exact", n), &n, |bn, _| bn.iter(|| black_box(a.exp().unwrap())));
        g.bench_with_input(BenchmarkId::new("polya_exp_exact", n), &n, |bn, _| {
            bn.iter(|| black_box(a.polya_exp().unwrap()))
        });
        let f = sample_float(n, 256);
        g.bench_with_input(BenchmarkId::new("exp_float256", n), &n, |bn, _| bn.iter(|| black_box(f.exp().unwrap())));
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("fixed_point");
    g.sample_size(10);
    for (b, n) in [(labelled(ClassName::Cacti), 30), (unlabelled(ClassName::Trees), 30), (unlabelled(ClassName::Sp), 12)] {
        let sys = b.system();
        g.bench_function(format!("{b} N={n}"), |bn| bn.iter(|| black_box(fixed_point(&sys, n).unwrap())));
    }
    g.finish();
}

fn singular(c: &mut Criterion) {
    let mut g = c.benchmark_group("singular");
    g.sample_size(10);
    for name in [ClassName::Trees, ClassName::Outerplanar, ClassName::Sp] {
        let sys = labelled(name).system();
        g.bench_function(format!("char_solve {name} 256"), |bn| bn.iter(|| black_box(char_solve(&sys, None, 256).unwrap())));
    }
    let sys = growth_system(ClassName::Trees, subcrit::Flavor::Unlabelled, Target::Graphs).unwrap();
    g.bench_function("growth unlabelled trees N=20", |bn| {
        bn.iter(|| black_box(refine_schedule(&sys, &[20], 256).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, series, solver, singular);
criterion_main!(benches);
