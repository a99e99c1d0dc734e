use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use scaled_bregman::grid::{discrimination_grid, GridSpec};
use scaled_bregman::oracle::{oracle_b_phi, Domain, OracleOptions};
use scaled_bregman::families::Rayleigh;
use scaled_bregman::{b_phi, d_phi, Generator, NaturalParam};
use scaled_bregman_bench::{binomial_measure, wavy_measure};

fn discrete(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrete");
    for d in [16usize, 1024, 65536] {
        let p = wavy_measure(d, 0.0);
        let q = wavy_measure(d, 1.3);
        let m = wavy_measure(d, 2.1);
        let g = Generator::power(0.7).unwrap();
        group.bench_with_input(BenchmarkId::new("d_phi", d), &d, |b, _| {
            b.iter(|| d_phi(black_box(&g), black_box(&p), black_box(&q)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("b_phi", d), &d, |b, _| {
            b.iter(|| b_phi(black_box(&g), black_box(&p), black_box(&q), black_box(&m)).unwrap())
        });
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let p = binomial_measure(10, 0.25);
    let q = binomial_measure(10, 0.20);
    let spec = GridSpec::default_sweep();
    c.bench_function("grid3d 50x50 binomial:10", |b| {
        b.iter(|| discrimination_grid(black_box(&p), black_box(&q), &spec).unwrap())
    });
}

fn closed_form_vs_quadrature(c: &mut Criterion) {
    let fam = Rayleigh.family();
    let (t1, t2, t0) = (NaturalParam::from(1.2), NaturalParam::from(1.7), NaturalParam::from(1.5));
    c.bench_function("rayleigh b_alpha closed form", |b| {
        b.iter(|| fam.b_alpha(black_box(0.4), &t1, &t2, &t0).unwrap())
    });
    let g = Generator::power(0.4).unwrap();
    let p = |y: f64| Rayleigh::natural_density(1.2, y);
    let q = |y: f64| Rayleigh::natural_density(1.7, y);
    let m = |y: f64| Rayleigh::natural_density(1.5, y);
    let opts = OracleOptions::default();
    c.bench_function("rayleigh b_alpha quadrature", |b| {
        b.iter(|| oracle_b_phi(&g, &p, &q, &m, &Domain::negative_half_line(), &opts).unwrap())
    });
}

criterion_group!(benches, discrete, grid, closed_form_vs_quadrature);
criterion_main!(benches);
