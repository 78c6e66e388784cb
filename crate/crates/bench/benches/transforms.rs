//! Transform kernels.
//!
//! ```bash
//! cargo bench -p tfzak-bench --bench transforms
//! cargo bench -p tfzak-bench --bench transforms -- zak
//! ```

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfzak_core::transforms::{finite_zak, fourier, stft_of_zak, stft_with, zak, StftOptions, ZakStftOptions};
use tfzak_core::{sample, Complex64, OrderedBasis, SampledField, Window};

fn gaussian(step: f64) -> SampledField {
    sample(|x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0), &[-16.0], &[16.0], step).unwrap()
}

fn finite(c: &mut Criterion) {
    let mut group = c.benchmark_group("finite_zak");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for l in [1024usize, 4096, 16384] {
        let f: Vec<Complex64> = (0..l).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let m = (l as f64).sqrt() as usize;
        group.throughput(Throughput::Elements(l as u64));
        group.bench_with_input(BenchmarkId::from_parameter(l), &f, |b, f| {
            b.iter(|| finite_zak(black_box(f), m, l / m).unwrap())
        });
    }
    group.finish();
}

fn continuous(c: &mut Criterion) {
    let mut group = c.benchmark_group("continuous");
    group.measurement_time(Duration::from_secs(8));
    let basis = OrderedBasis::standard(1);
    for step in [1.0 / 32.0, 1.0 / 64.0] {
        let f = gaussian(step);
        let label = format!("h=1/{}", (1.0 / step) as usize);
        group.bench_with_input(BenchmarkId::new("fourier", &label), &f, |b, f| b.iter(|| fourier(f).unwrap()));
        group.bench_with_input(BenchmarkId::new("zak", &label), &f, |b, f| b.iter(|| zak(f, &basis).unwrap()));
        let opts = StftOptions { x_stride: 4, ..Default::default() };
        group.bench_with_input(BenchmarkId::new("stft", &label), &f, |b, f| {
            b.iter(|| stft_with(f, &Window::standard(1), &opts).unwrap())
        });
    }
    group.finish();
}

// The 4-axis STFT of a Zak transform; the heaviest kernel of the suite.
fn zak_stft(c: &mut Criterion) {
    let mut group = c.benchmark_group("stft_of_zak");
    group.sample_size(10);
    let f = gaussian(1.0 / 32.0);
    let opts = ZakStftOptions {
        x_per_cell: Some(8),
        xi_per_cell: 8,
        x_cells: 2,
        xi_cells: 2,
        eta_crop: Some(32),
        y_crop: Some(32),
        ..Default::default()
    };
    group.bench_function("16x16x32x32", |b| {
        b.iter(|| stft_of_zak(&f, &OrderedBasis::standard(1), &Window::standard(2), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, finite, continuous, zak_stft);
criterion_main!(benches);
