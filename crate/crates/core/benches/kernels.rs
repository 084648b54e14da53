//! Parallel kernels on a one-thread pool against the default pool. Built
//! without the `parallel` feature, only the sequential variants run.

use criterion::{criterion_group, criterion_main, Criterion};
use eisenlab::recipe::{f_eps, ChiKind, ShiftState};
use eisenlab::special::{dbw_integral, PrecisionBudget};

fn kernels() -> Vec<(&'static str, Box<dyn Fn() + Sync>)> {
    let tight = PrecisionBudget {
        target_abs_err: 1e-12,
        ..PrecisionBudget::default()
    };
    let state = ShiftState {
        epsilon: [1, 1, 1, -1],
        alpha: ShiftState::alpha0(0.3),
        t: 0.3,
        n: 5,
        chi_kind: ChiKind::Quadratic,
    };
    vec![
        (
            "dbw_integral",
            Box::new(move || {
                dbw_integral(0.5, tight).unwrap();
            }),
        ),
        (
            "f_eps",
            Box::new(move || {
                f_eps(&state, &PrecisionBudget::default()).unwrap();
            }),
        ),
    ]
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    use criterion::BenchmarkId;

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let mut group = c.benchmark_group("pool");
    for (name, f) in kernels() {
        group.bench_function(BenchmarkId::new(name, "single thread"), |b| {
            b.iter(|| single.install(&f))
        });
        group.bench_function(
            BenchmarkId::new(name, format!("default pool ({})", default.current_num_threads())),
            |b| b.iter(|| default.install(&f)),
        );
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("sequential");
    for (name, f) in kernels() {
        group.bench_function(name, |b| b.iter(&f));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
