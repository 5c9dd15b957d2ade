use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pwl_moments::harness::{convergence_study, StudyConfig};
use pwl_moments::parallel::Execution;

fn config(execution: Execution) -> StudyConfig {
    let mut c = StudyConfig::default();
    c.apply_text("density=gauss1d,crossingbeams1d\nmodels=HFM[9,17,33],PMM[8,16,32],M[2,4,8]\n")
        .expect("valid config");
    c.execution = execution;
    c
}

fn study(c: &mut Criterion) {
    let mut group = c.benchmark_group("convergence_study");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let cfg = config(exec);
        group.bench_function(name, |b| b.iter(|| convergence_study(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, study);
criterion_main!(benches);
