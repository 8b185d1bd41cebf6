//! Sequential against parallel execution on the sample-parallel workloads.
//! Built without the `parallel` feature both arms run on one thread.

use std::hint::black_box;

use calogero::dynamics::{integrate_many, InitialState, IntegrationConfig};
use calogero::par::Execution;
use calogero::verify::{bounded_start, run, Suite, SuiteOptions};
use calogero::ModelParams;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for (suite, samples) in [
        (Suite::IdentitiesN3, 1000),
        (Suite::Ksq, 1000),
        (Suite::Brackets, 100),
    ] {
        for (mode, execution) in MODES {
            let opts = SuiteOptions {
                samples: Some(samples),
                seed: Some(7),
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(suite.to_string(), mode), &opts, |b, o| {
                b.iter(|| black_box(run(suite, o).expect("suite runs")))
            });
        }
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let params = ModelParams::new(3, 1.0).expect("params");
    let starts: Vec<InitialState> = (0..32)
        .map(|seed| InitialState::Reduced(bounded_start(3, 1.0, seed).expect("start")))
        .collect();
    let cfg = IntegrationConfig::leapfrog(1e-3, 2000, 100);
    let mut group = c.benchmark_group("integrate_many");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(BenchmarkId::new("n3_x32", mode), |b| {
            b.iter(|| black_box(integrate_many(starts.clone(), &params, &cfg, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, suites, trajectories);
criterion_main!(benches);
