//! Mixed-norm reductions over 2-d fields.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfzak_core::norms::{mixed_lebesgue_norm, wiener_norm, Domain};
use tfzak_core::{Axis, Complex64, Exponent, MixedExponent, OrderedBasis, SampledField, Weight};

fn field(n: usize) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ax = Axis::line(-8.0, 16.0 / n as f64, n);
    let v = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SampledField::new(vec![ax, ax], v).unwrap()
}

fn reductions(c: &mut Criterion) {
    let mut group = c.benchmark_group("norms");
    let e = OrderedBasis::standard(2);
    let q = MixedExponent::new(vec![Exponent::of(0.5), Exponent::Infinite]).unwrap();
    let r = MixedExponent::from(Exponent::of(2.0));
    let w = Weight::polynomial(1.5);
    for n in [256usize, 1024] {
        let f = field(n);
        group.bench_with_input(BenchmarkId::new("mixed_lebesgue", n), &f, |b, f| {
            b.iter(|| mixed_lebesgue_norm(black_box(f), &e, &q, &w, &Domain::Full).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("wiener", n), &f, |b, f| {
            b.iter(|| wiener_norm(black_box(f), &e, &r, &q, &w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, reductions);
criterion_main!(benches);
