use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use darbouxkit::darboux::{darboux_gauge, darboux_potential, solution_residual};
use darbouxkit::linsys::companion;
use darbouxkit::numverify::{check_constructions, integrate, Settings, C};
use darbouxkit::sympow::sym_group;
use darbouxkit::tensordt::{q_route_system, t1, t2};
use darbouxkit::{Bindings, DarbouxSeed, DerivationTable, Expr, SecondOrderFamily};

fn generic() -> (SecondOrderFamily, DarbouxSeed) {
    let t = DerivationTable::new()
        .with_free("p")
        .with_free("q")
        .with_free("r")
        .with_ode("w", 1, &(Expr::sym("p") * Expr::sym("w")))
        .unwrap();
    let f = SecondOrderFamily::new(Expr::sym("w"), Expr::sym("q"), Expr::sym("r"), "m", t).unwrap();
    let seed = DarbouxSeed::symbolic(&f, "theta0", Expr::zero()).unwrap();
    (f, seed)
}

fn kernel(c: &mut Criterion) {
    let x = Expr::x();
    // arithmetic normalizes eagerly, so building the expression is the work
    c.bench_function("build_rational", |b| {
        b.iter(|| {
            let x = black_box(&x);
            ((x + 1).pow(6) - (x - 1).pow(6)) / (x.pow(2) + 1) + (x * 2 + Expr::i()).pow(4) / (x + 3)
        })
    });
    let s = (x.pow(2) + 1).sqrt() * (&x * Expr::rat(1, 2)).exp();
    let t = DerivationTable::new();
    c.bench_function("diff_sqrt_exp", |b| b.iter(|| black_box(&s).diff(&t).unwrap()));
}

fn darboux(c: &mut Criterion) {
    let (f, seed) = generic();
    c.bench_function("darboux_potential_generic", |b| b.iter(|| darboux_potential(&f, &seed).unwrap()));
    c.bench_function("solution_residual_generic", |b| b.iter(|| solution_residual(&f, &seed, "y").unwrap()));
    let fs = f.with_table(seed.table().clone());
    let p = darboux_gauge(&f, &seed).unwrap().p;
    c.bench_function("sym2_of_darboux_gauge", |b| b.iter(|| sym_group(p.matrix(), 2).unwrap()));
    let mut g = c.benchmark_group("lifted");
    g.sample_size(10);
    g.bench_function("t1_generic", |b| b.iter(|| t1(&fs, &seed).unwrap()));
    g.bench_function("t2_generic", |b| b.iter(|| t2(&fs, &seed).unwrap()));
    g.bench_function("q_route_system_generic", |b| b.iter(|| q_route_system(&f).unwrap()));
    g.finish();
}

fn numeric(c: &mut Criterion) {
    let x = Expr::x();
    let f = SecondOrderFamily::new(1 + &x * Expr::rat(1, 2), 1 - x.pow(2), Expr::one(), "m", DerivationTable::new())
        .unwrap();
    let sys = companion(&f);
    let params = Bindings::new().with("m", 0.5);
    let x0 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    c.bench_function("rk4_companion_1000_steps", |b| {
        b.iter(|| integrate(&sys, &params, &x0, (0.0, 1.0), 1e-3).unwrap())
    });
    let s = Settings { trials: 1, ..Settings::default() };
    let mut g = c.benchmark_group("golden");
    g.sample_size(10);
    g.bench_function("constructions_one_trial", |b| b.iter(|| check_constructions(&s)));
    g.finish();
}

criterion_group!(benches, kernel, darboux, numeric);
criterion_main!(benches);
