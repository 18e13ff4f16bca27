use criterion::{black_box, criterion_group, criterion_main, Criterion};

use crossjump_bench::{linear_gain_spec, node_spec, reference_spec};
use crossjump_core::{
    classify_system, displacement, displacement_derivative, empirical_return_map, run, Point2,
    SimConfig,
};

fn bench_classify(c: &mut Criterion) {
    let cycle = reference_spec();
    c.bench_function("classify_cycle", |b| {
        b.iter(|| classify_system(black_box(&cycle)).unwrap())
    });
    let node = node_spec();
    c.bench_function("classify_node_case", |b| {
        b.iter(|| classify_system(black_box(&node)).unwrap())
    });
}

fn bench_displacement_curve(c: &mut Criterion) {
    let analysis = classify_system(&reference_spec()).unwrap();
    let params = analysis.loop_data.unwrap().displacement;
    let xs: Vec<f64> = (0..100)
        .map(|i| (0.1f64.ln() + (200f64.ln() - 0.1f64.ln()) * i as f64 / 99.0).exp())
        .collect();
    c.bench_function("displacement_100_points", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &x in &xs {
                acc += displacement(black_box(&params), x);
                acc += displacement_derivative(black_box(&params), x);
            }
            acc
        })
    });
}

fn bench_simulate(c: &mut Criterion) {
    let spec = reference_spec();
    let cfg = SimConfig::default();
    c.bench_function("simulate_converging_orbit", |b| {
        b.iter(|| run(black_box(&spec), Point2::new(50.0, 0.0), &cfg).unwrap())
    });
    c.bench_function("empirical_return_map", |b| {
        b.iter(|| empirical_return_map(black_box(&spec), 1.0, &cfg).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    c.bench_function("sweep_rho_20_points", |b| {
        b.iter(|| {
            let mut cycles = 0;
            for i in 0..20 {
                let rho = 10.0 * i as f64 / 19.0;
                let spec = linear_gain_spec(25.0, rho);
                if classify_system(black_box(&spec)).unwrap().verdict.cycle.is_some() {
                    cycles += 1;
                }
            }
            cycles
        })
    });
}

criterion_group!(
    benches,
    bench_classify,
    bench_displacement_curve,
    bench_simulate,
    bench_sweep
);
criterion_main!(benches);
