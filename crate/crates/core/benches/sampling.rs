use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fermi_ent::oracle::{convex_roof_search, min_entropy_over_qsp_bases, SearchBudget};
use fermi_ent::par::Execution;
use fermi_ent::random::{random_state, seeded};
use fermi_ent::{MixedState, Parity};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn qsp_sampling(c: &mut Criterion) {
    let psi = random_state(4, Parity::Odd, &mut seeded(11, 0));
    let budget = SearchBudget::new(2000, 20, 1);
    let mut group = c.benchmark_group("qsp_search");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| min_entropy_over_qsp_bases(black_box(&psi), &budget, exec).unwrap().value)
        });
    }
    group.finish();
}

fn roof_sampling(c: &mut Criterion) {
    let mut rng = seeded(12, 0);
    let parts: Vec<_> = (0..4).map(|k| (0.4 - 0.1 * k as f64, random_state(4, Parity::Even, &mut rng))).collect();
    let rho = MixedState::mixture(4, &parts).unwrap();
    let budget = SearchBudget::new(2000, 20, 1);
    let mut group = c.benchmark_group("roof_search");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| convex_roof_search(black_box(&rho), &budget, exec).unwrap().value)
        });
    }
    group.finish();
}

criterion_group!(benches, qsp_sampling, roof_sampling);
criterion_main!(benches);
