use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use folkengine_core::corpus::{default_corpus, groupoid2, interval};
use folkengine_core::fincat::{enumerate_functors, product};
use folkengine_core::homotopy::find_equivalence;
use folkengine_core::interval::{mapping_cylinder, standard, verify::verify_interval};
use folkengine_core::modelstruct::{factor_composite, Mode};

fn kernel(c: &mut Criterion) {
    let g2 = groupoid2();
    let i = interval();
    c.bench_function("product G2 x I", |b| b.iter(|| product(black_box(&g2), &i)));
    c.bench_function("functors G2 -> G2", |b| b.iter(|| enumerate_functors(black_box(&g2), &g2).len()));
}

fn constructions(c: &mut Criterion) {
    let corpus = default_corpus();
    let fam = corpus.test_family();
    c.bench_function("interval verify", |b| b.iter(|| verify_interval(standard(), &fam, 4).passed()));
    let f = corpus.functors.iter().max_by_key(|f| f.dom.n_arr() + f.cod.n_arr()).unwrap().clone();
    c.bench_function("mapping cylinder", |b| b.iter(|| mapping_cylinder(black_box(&f)).m.n_arr()));
    c.bench_function("equivalence search over the corpus", |b| {
        b.iter(|| corpus.functors.iter().filter(|f| find_equivalence(f).is_some()).count())
    });
    let mut g = c.benchmark_group("factor");
    g.sample_size(10);
    for mode in Mode::ALL {
        g.bench_function(mode.name(), |b| b.iter(|| factor_composite(black_box(&f), mode).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, kernel, constructions);
criterion_main!(benches);
