use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qkd_witness::cli::{scan, theta_grid};
use qkd_witness::measurements::{joint_distribution, Protocol};
use qkd_witness::par;
use qkd_witness::sampling::{random_state, rng};
use qkd_witness::witnesses::{detect_4state, detect_6state, grid_search_family};
use qkd_witness::VERDICT_TOL;

fn thread_counts() -> Vec<(&'static str, usize)> {
    let mut v = vec![("sequential", 1)];
    if par::is_parallel() {
        v.push(("parallel", std::thread::available_parallelism().map_or(1, |n| n.get())));
    }
    v
}

fn bench_scan(c: &mut Criterion) {
    let thetas = theta_grid(0.0, std::f64::consts::FRAC_PI_2, 181).unwrap();
    let mut g = c.benchmark_group("scan_181");
    for (name, threads) in thread_counts() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::with_threads(threads, || b.iter(|| scan(black_box(&thetas), VERDICT_TOL).unwrap()))
        });
    }
    g.finish();
}

fn bench_grid(c: &mut Criterion) {
    let s = random_state(&mut rng(1));
    let d = joint_distribution(&s, &Protocol::four_state());
    let mut g = c.benchmark_group("grid_search_family");
    g.sample_size(20);
    for res in [16usize, 32] {
        for (name, threads) in thread_counts() {
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, &res| {
                par::with_threads(threads, || {
                    b.iter(|| grid_search_family(black_box(&d), res, VERDICT_TOL).unwrap())
                })
            });
        }
    }
    g.finish();
}

fn bench_batch(c: &mut Criterion) {
    let mut r = rng(2);
    let states: Vec<_> = (0..1000).map(|_| random_state(&mut r)).collect();
    let mut g = c.benchmark_group("detect_batch_1000");
    for (name, threads) in thread_counts() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::with_threads(threads, || {
                b.iter(|| {
                    par::map(&states, |s| {
                        let d4 = joint_distribution(s, &Protocol::four_state());
                        let d6 = joint_distribution(s, &Protocol::six_state());
                        (
                            detect_4state(&d4, VERDICT_TOL).unwrap().verdict,
                            detect_6state(&d6, VERDICT_TOL).unwrap().verdict,
                        )
                    })
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_scan, bench_grid, bench_batch);
criterion_main!(benches);
