use criterion::{criterion_group, criterion_main, Criterion};

use gj_bench::{datum, newform, session};
use gj_core::whittaker::{spherical_whittaker_cs, WhittakerSpec};
use gj_core::{Newform, PadicMatrix};

fn conductor_search(c: &mut Criterion) {
    let s = session(3);
    let d = datum(3, &["quad", "quad"]);
    c.bench_function("newform quad+quad p=3", |b| b.iter(|| Newform::new(&d, s.field(), s.budget()).unwrap()));
}

fn matrix_coefficient(c: &mut Criterion) {
    let s = session(3);
    let nf = newform(&s, &["quad", "unram"]);
    let g = PadicMatrix::from_ints(3, 2, 2, &[9, 1, 3, 1]).unwrap();
    c.bench_function("beta p=3 v(det)=1", |b| b.iter(|| nf.beta(&g).unwrap()));
}

fn whittaker(c: &mut Criterion) {
    let s = session(2);
    let d = datum(2, &["unram", "unram", "unram"]);
    let spec = WhittakerSpec::new(&d, false).unwrap();
    c.bench_function("casselman-shalika GL3 (4,2,0)", |b| {
        b.iter(|| spherical_whittaker_cs(&spec, s.field(), &[4, 2, 0]).unwrap())
    });
}

criterion_group!(benches, conductor_search, matrix_coefficient, whittaker);
criterion_main!(benches);
