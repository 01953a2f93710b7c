use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use plpcov::laplace::{joint_lt, Conditioning, InterferenceComponent};
use plpcov::montecarlo::relay_records;
use plpcov::{McConfig, ModelParams, QuadratureSpec, RelayAnalyzer, ServingEvent};

fn analytic(c: &mut Criterion) {
    let p = ModelParams::default();
    let spec = QuadratureSpec::default();
    let mut g = c.benchmark_group("analytic");
    g.sample_size(10);
    g.bench_function("analyzer_tables", |b| b.iter(|| RelayAnalyzer::new(black_box(&p), &spec).unwrap()));
    let a = RelayAnalyzer::new(&p, &spec).unwrap();
    g.bench_function("relay_coverage_r1_0.1", |b| b.iter(|| a.relay_coverage(black_box(0.1)).unwrap()));
    g.bench_function("scenario_a", |b| b.iter(|| a.scenario_a_coverage().unwrap()));
    g.finish();
}

fn laplace(c: &mut Criterion) {
    let p = ModelParams::default();
    let spec = QuadratureSpec::default();
    let cond = Conditioning::Serving {
        event: ServingEvent::CrossRoad { rank: 2, y: 0.05 },
        rb1: 0.15,
    };
    c.bench_function("joint_lt_i3", |b| {
        b.iter(|| joint_lt(InterferenceComponent::I3, black_box(4e-3), 1.6e-2, &p, cond, &spec).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let p = ModelParams::default();
    let cfg = McConfig::new(512, 7, 3.0);
    let mut g = c.benchmark_group("montecarlo");
    g.sample_size(10);
    g.bench_function("relay_records_512", |b| b.iter(|| relay_records(&p, black_box(&cfg), 0.1).unwrap()));
    g.finish();
}

criterion_group!(benches, analytic, laplace, simulation);
criterion_main!(benches);
