use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use telewig_bench::{disk, squeeze_grid};
use telewig_core::channel::{build_map, origin_fock1, TeleportParams};
use telewig_core::conditional::best_conditional_origin;
use telewig_core::oracle::mc::disk_average_mc;
use telewig_core::oracle::quadrature::origin_via_quadrature;
use telewig_core::phase_space::{make_fock1, SqueezeSpec, WignerMixture};
use telewig_core::{optimal_gain, threshold_unconditional};

fn closed_forms(c: &mut Criterion) {
    let grid = squeeze_grid();
    c.bench_function("optimal_gain/15", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&r| optimal_gain(black_box(r)).unwrap().origin)
                .sum::<f64>()
        })
    });
    c.bench_function("conditional_gain/15", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&r| best_conditional_origin(black_box(r).tanh(), disk(), 0.8))
                .sum::<f64>()
        })
    });
    c.bench_function("threshold_unconditional", |b| {
        b.iter(|| threshold_unconditional(black_box(0.6304)).unwrap())
    });
}

fn oracles(c: &mut Criterion) {
    let map = build_map(&TeleportParams::unity(SqueezeSpec::new(0.8).unwrap()));
    let w_in = WignerMixture::from(make_fock1());
    c.bench_function("closed_form_origin", |b| b.iter(|| origin_fock1(black_box(&map))));
    c.bench_function("quadrature_origin", |b| {
        b.iter(|| origin_via_quadrature(&map, &w_in, 1e-9).unwrap())
    });
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("disk_20k", |b| {
        b.iter(|| disk_average_mc(0.6, 1.0, disk(), 0.8, 20_000, black_box(2010)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, closed_forms, oracles);
criterion_main!(benches);
