use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gj_bench::{newform, session};
use gj_core::zeta::{gj_zeta, Strategy};
use gj_core::SBFunction;

fn strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("gj_zeta");
    group.sample_size(10);
    for (p, names) in [(2, ["unram", "unram"]), (3, ["quad", "unram"]), (3, ["quad", "quad"])] {
        let s = session(p);
        let nf = newform(&s, &names);
        let phi = match nf.conductor() {
            0 => SBFunction::Indicator { n: 2 },
            c => SBFunction::main(nf.data(), c),
        };
        let label = format!("p{p}-{}", names.join("+"));
        for strategy in [Strategy::Hermite, Strategy::Brute] {
            group.bench_with_input(BenchmarkId::new(strategy.name(), &label), &strategy, |b, &st| {
                b.iter(|| gj_zeta(&nf, &phi, 3, st, &s.budget()).unwrap())
            });
        }
    }
    group.finish();
}

fn hermite_depth(c: &mut Criterion) {
    let s = session(3);
    let nf = newform(&s, &["quad", "unram"]);
    let phi = SBFunction::main(nf.data(), 1);
    let mut group = c.benchmark_group("hermite_by_T");
    group.sample_size(10);
    for t in [2, 4, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| gj_zeta(&nf, &phi, t, Strategy::Hermite, &s.budget()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, strategies, hermite_depth);
criterion_main!(benches);
