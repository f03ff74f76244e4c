use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rk_core::exactfield::ParamField;
use rk_core::genus2::{richelot_split, richelot_transform};
use rk_core::igusa::igusa_clebsch;
use rk_core::jacobian::two_torsion_from_factor;
use rk_core::kowtop::{curve_c1, curve_c2};
use rk_core::Rational;

fn algebra(c: &mut Criterion) {
    let (h, k) = (Rational::new(3, 2), Rational::integer(5));
    let (c2, split) = curve_c2(&h, &k).unwrap();
    c.bench_function("richelot step over Q", |b| b.iter(|| richelot_split(black_box(&split)).unwrap()));
    let c1 = curve_c1(&h, &k).unwrap();
    c.bench_function("igusa-clebsch of C1 over Q", |b| b.iter(|| igusa_clebsch(black_box(c1.f())).unwrap()));
    c.bench_function("two-torsion class and its double", |b| {
        b.iter(|| two_torsion_from_factor(black_box(split.g(1)), &c2).unwrap().class.double(&c2).unwrap())
    });
    let (ph, pk) = (ParamField::h(), ParamField::i2());
    let (sc2, ssplit) = curve_c2(&ph, &pk).unwrap();
    let mut g = c.benchmark_group("symbolic");
    g.sample_size(10);
    g.bench_function("richelot step over Q(i)(H)(I2)", |b| b.iter(|| richelot_transform(black_box(&sc2), &ssplit).unwrap()));
    g.finish();
}

criterion_group!(benches, algebra);
criterion_main!(benches);
