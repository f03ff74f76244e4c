use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rk_core::kowtop::{integrate_top, TopState};
use rk_core::numverify::{mult2_check, DoubleDouble};
use rk_core::{build_tower, Rational, TowerOptions};

fn numeric(c: &mut Criterion) {
    let (h, k) = (Rational::integer(1), Rational::integer(2));
    c.bench_function("mult2, 5 classes, 53 bits", |b| b.iter(|| mult2_check::<f64>(black_box(&h), &k, 5, 1).unwrap()));
    c.bench_function("mult2, 5 classes, 106 bits", |b| {
        b.iter(|| mult2_check::<DoubleDouble>(black_box(&h), &k, 5, 1).unwrap())
    });
    let s0 = TopState::new([1.0, 0.0, 1.0], [0.0, 1.0, 0.0]);
    c.bench_function("rk4, 1000 steps", |b| b.iter(|| integrate_top(black_box(&s0), 1.0, 1e-3, 1000).unwrap()));
    let mut g = c.benchmark_group("tower");
    g.sample_size(10);
    let opts = TowerOptions { mult2_samples: 2, ..Default::default() };
    let (th, tk) = (Rational::new(3, 2), Rational::integer(5));
    g.bench_function("depth 5, real-numeric, 53 bits", |b| b.iter(|| build_tower::<f64>(black_box(&th), &tk, 5, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, numeric);
criterion_main!(benches);
