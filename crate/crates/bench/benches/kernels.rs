use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fracext::combinatorics::{count_solutions, g_histogram, sumset_cardinality, Progression};
use fracext::convolution::convolve_grid;
use fracext::dimension::{energy_integral, fourier_decay_fit};
use fracext::extension::{evaluate_on_grid, multilinear_ratio};
use fracext::knapp::{choose_profiles, mli_set, KnappParams, PhiSpec};
use fracext::FrequencyGrid;
use fracext_bench::{cantor, pair_family, power_density};

fn extension(c: &mut Criterion) {
    let mut g = c.benchmark_group("extension");
    for depth in [6, 8, 10] {
        let mu = cantor(depth);
        let grid = FrequencyGrid::new(200.0, 0.125).unwrap();
        g.bench_with_input(BenchmarkId::new("cantor_grid", depth), &mu, |b, mu| {
            b.iter(|| evaluate_on_grid(black_box(mu), None, &grid).unwrap())
        });
    }
    let mus = vec![cantor(7), cantor(7)];
    let fs: Vec<Vec<f64>> = mus.iter().map(|m| vec![1.0; m.len()]).collect();
    let grid = FrequencyGrid::new(100.0, 0.0625).unwrap();
    g.bench_function("bilinear_ratio", |b| {
        b.iter(|| multilinear_ratio(black_box(&mus), &fs, 2.0, 4.0, &grid).unwrap())
    });
    g.finish();
}

fn dimension(c: &mut Criterion) {
    let mut g = c.benchmark_group("dimension");
    g.sample_size(20);
    let mu = cantor(8);
    g.bench_function("energy_cantor8", |b| b.iter(|| energy_integral(black_box(&mu), 0.5).unwrap()));
    let u = power_density(0.0, 1024);
    g.bench_function("decay_fit_uniform", |b| {
        b.iter(|| fourier_decay_fit(black_box(&u), 1.0, 1e3, 400).unwrap())
    });
    g.finish();
}

fn convolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("convolution");
    g.sample_size(10);
    for cells in [1usize << 12, 1 << 14] {
        let pair = vec![power_density(0.6, cells), power_density(0.6, cells)];
        g.bench_with_input(BenchmarkId::new("power_pair", cells), &pair, |b, pair| {
            b.iter(|| convolve_grid(black_box(pair), cells).unwrap())
        });
    }
    g.finish();
}

fn combinatorics(c: &mut Criterion) {
    let mut g = c.benchmark_group("combinatorics");
    g.bench_function("mli_set_30_4", |b| b.iter(|| mli_set(black_box(30), 4).unwrap()));
    let ds = mli_set(12, 3).unwrap();
    let aps: Vec<Progression> = ds
        .iter()
        .map(|&d| Progression { start: 0, step: d as i128, len: 12 })
        .collect();
    g.bench_function("sumset_3x12", |b| b.iter(|| sumset_cardinality(black_box(&aps)).unwrap()));
    let sets: Vec<Vec<i128>> = vec![(0..40).map(|i| i * i % 97).collect(), (0..40).map(|i| 3 * i).collect()];
    g.bench_function("histogram_count_r2", |b| {
        b.iter(|| count_solutions(&g_histogram(black_box(&sets), 2).unwrap()))
    });
    g.finish();
}

fn knapp(c: &mut Criterion) {
    let mut g = c.benchmark_group("knapp");
    g.sample_size(10);
    let params = KnappParams {
        k: 2,
        alphas: vec![0.4, 0.4],
        betas: vec![0.4, 0.4],
        phi: PhiSpec { epsilon: 1.0 },
        n_max: 6,
        seed: 0,
    };
    g.bench_function("profiles_n6", |b| b.iter(|| choose_profiles(black_box(&params)).unwrap()));
    g.bench_function("family_n4", |b| b.iter(|| pair_family(black_box(4), 1)));
    g.finish();
}

criterion_group!(benches, extension, dimension, convolution, combinatorics, knapp);
criterion_main!(benches);
