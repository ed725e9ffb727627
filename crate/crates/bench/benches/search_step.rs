//! Whole-search cost: S5 vs SSS at growing p on a fixed budget.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use s5_bench::fixture;
use s5_core::marginal::{log_posterior_score, ScorerConfig};
use s5_core::search::{geometric_schedule, Algorithm};
use s5_core::sim::CovCase;
use s5_core::{run_s5, run_sss, Model, ModelPrior, PriorFamily, SearchConfig};

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for p in [100usize, 400] {
        let (data, _) = fixture(CovCase::CompoundSymmetry, 200, p, 9);
        let cfg = ScorerConfig::new(
            PriorFamily::Pimom {
                tau: s5_core::default_tau(200, p),
                r: 1,
            },
            ModelPrior::UniformRestricted { qn: 40 },
        );
        let scorer = |k: &Model| log_posterior_score(&data, k, &cfg);

        let s5 = SearchConfig {
            algorithm: Algorithm::S5 {
                iterations_per_level: 5,
                screen_size: 20,
                schedule: geometric_schedule(4, 3.0, 1.0),
            },
            qn: 40,
            seed: 1,
            screen_residual: Default::default(),
        };
        group.bench_with_input(BenchmarkId::new("s5", p), &s5, |b, s5| {
            b.iter(|| black_box(run_s5(&data, &scorer, s5, &Model::empty()).unwrap().len()));
        });

        let sss = SearchConfig::sss(16, 40, 1);
        group.bench_with_input(BenchmarkId::new("sss", p), &sss, |b, sss| {
            b.iter(|| black_box(run_sss(&data, &scorer, sss, &Model::empty()).unwrap().len()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_search);
criterion_main!(benches);
