use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};
use odds_seq::analysis::{degroot_oracle, series_expectation};
use odds_seq::montecarlo::run_trials;
use odds_seq::sampling::{estimate_log_odds, estimate_odds, harmonic};
use odds_seq::source::ObservationSource;
use odds_seq::EstimatorKind;

fn bench_bernoulli_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("bernoulli_draws");
    group.throughput(Throughput::Elements(10_000));
    group.bench_function("prng_10k", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut src = ObservationSource::prng(0.3, seed).unwrap();
            let mut successes = 0u32;
            for _ in 0..10_000 {
                if src.next_observation().unwrap() == odds_seq::Observation::Success {
                    successes += 1;
                }
            }
            black_box(successes)
        })
    });
    group.finish();
}

fn bench_estimators(c: &mut Criterion) {
    c.bench_function("estimate_odds_r26_p05", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut src = ObservationSource::prng(0.5, seed).unwrap();
            black_box(estimate_odds(&mut src, 26).unwrap().value)
        })
    });
    c.bench_function("estimate_log_odds_r27_p05", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut src = ObservationSource::prng(0.5, seed).unwrap();
            black_box(estimate_log_odds(&mut src, 27).unwrap().value)
        })
    });
}

fn bench_oracles(c: &mut Criterion) {
    c.bench_function("series_mean_r10_p01", |b| {
        b.iter(|| {
            let res = series_expectation(10, 0.1, |n| n as f64, 1, 1e-12).unwrap();
            black_box(res.value)
        })
    });
    c.bench_function("degroot_oracle_r10_n30", |b| {
        b.iter(|| black_box(degroot_oracle(10, 30).unwrap()))
    });
    c.bench_function("harmonic_10k", |b| b.iter(|| black_box(harmonic(10_000))));
}

fn bench_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("run_trials_odds_r10_p05_10k", |b| {
        b.iter(|| black_box(run_trials(EstimatorKind::Odds, 0.5, 10, 10_000, 1, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_bernoulli_draws,
    bench_estimators,
    bench_oracles,
    bench_trials
);
criterion_main!(benches);
