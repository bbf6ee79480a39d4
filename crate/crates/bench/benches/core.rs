use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nlsx_core::{functionals, kernels, make_grid, strang_step, Field, Mu};
use num_complex::Complex64;

fn gaussian(n: usize) -> Field {
    let g = make_grid(n, 16.0).unwrap();
    Field::from_fn(&g, |x, y| Complex64::new(0.3 * (-(x * x + y * y)).exp(), 0.0)).unwrap()
}

fn bench_kernels(c: &mut Criterion) {
    let points: Vec<f64> = (0..1000).map(|i| 100.0 * (i as f64 / 999.0).powi(3)).collect();
    c.bench_function("multiplier_1000", |b| {
        b.iter(|| points.iter().map(|&s| kernels::multiplier(black_box(s) / (4.0 * std::f64::consts::PI), Mu::One).unwrap()).sum::<f64>())
    });
    c.bench_function("g_kernel_1000", |b| {
        b.iter(|| points.iter().map(|&s| kernels::g_kernel(black_box(s), Mu::One).unwrap()).sum::<f64>())
    });
}

fn bench_step_and_functionals(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    for n in [128usize, 256] {
        let f = gaussian(n);
        group.bench_with_input(BenchmarkId::new("strang_step", n), &f, |b, f| {
            b.iter(|| strang_step(black_box(f), 1e-3, Mu::One).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("functionals", n), &f, |b, f| {
            b.iter(|| functionals(black_box(f), Mu::One).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_kernels, bench_step_and_functionals);
criterion_main!(benches);
