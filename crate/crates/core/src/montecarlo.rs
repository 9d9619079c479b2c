//! Replicated simulation of the estimators: empirical bias, variance,
//! sample size, and Wolfowitz efficiency.
//!
//! Determinism contract: replication `i` draws from a fresh PRNG source
//! seeded with `derive_child_seed(master_seed, i)`. Replications are grouped
//! into a fixed partition of at most [`BLOCKS`] contiguous blocks that
//! depends only on `reps` — never on the worker count — and block statistics
//! are merged in ascending block order. Results are therefore bit-identical
//! for any `workers` value; threads only decide *who* computes each block.
//! The same partition provides the jackknife blocks for the efficiency
//! standard error.

use crate::analysis::AnalysisError;
use crate::sampling::{estimate_log_odds, estimate_odds, EstimateError};
use crate::source::{derive_child_seed, ObservationSource, SourceError};
use crate::EstimatorKind;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Fixed block count for worker scheduling and jackknife resampling.
pub const BLOCKS: u64 = 100;

/// Mergeable running statistics over (estimate, sample size) pairs.
///
/// Welford accumulation; `m2_*` is the sum of squared deviations from the
/// running mean, so `variance = m2 / (count - 1)`. Merging is associative
/// and order-insensitive up to floating point (see `merge`), with relative
/// deviations bounded near 1e-10 in practice.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialStats {
    pub count: u64,
    pub mean_estimate: f64,
    pub m2_estimate: f64,
    pub mean_n: f64,
    pub m2_n: f64,
}

impl TrialStats {
    pub fn new() -> TrialStats {
        TrialStats::default()
    }

    /// Folds one replication into the statistics.
    pub fn push(&mut self, estimate: f64, n: f64) {
        self.count += 1;
        let c = self.count as f64;
        let d_est = estimate - self.mean_estimate;
        self.mean_estimate += d_est / c;
        self.m2_estimate += d_est * (estimate - self.mean_estimate);
        let d_n = n - self.mean_n;
        self.mean_n += d_n / c;
        self.m2_n += d_n * (n - self.mean_n);
    }

    /// Combines statistics over two disjoint replication sets.
    pub fn merge(&self, other: &TrialStats) -> TrialStats {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let (ca, cb, c) = (self.count as f64, other.count as f64, count as f64);
        let d_est = other.mean_estimate - self.mean_estimate;
        let d_n = other.mean_n - self.mean_n;
        TrialStats {
            count,
            mean_estimate: self.mean_estimate + d_est * cb / c,
            m2_estimate: self.m2_estimate + other.m2_estimate + d_est * d_est * ca * cb / c,
            mean_n: self.mean_n + d_n * cb / c,
            m2_n: self.m2_n + other.m2_n + d_n * d_n * ca * cb / c,
        }
    }

    /// Sample variance of the estimates (`count >= 2`).
    pub fn variance_estimate(&self) -> f64 {
        self.m2_estimate / (self.count as f64 - 1.0)
    }

    /// Sample variance of the per-replication sample sizes.
    pub fn variance_n(&self) -> f64 {
        self.m2_n / (self.count as f64 - 1.0)
    }

    /// Standard error of `mean_estimate`.
    pub fn stderr_mean_estimate(&self) -> f64 {
        (self.variance_estimate() / self.count as f64).sqrt()
    }

    /// Standard error of `mean_n`.
    pub fn stderr_mean_n(&self) -> f64 {
        (self.variance_n() / self.count as f64).sqrt()
    }
}

/// Errors from the Monte Carlo harness.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialError {
    /// Bad parameters (p, r, reps, workers).
    Domain(String),
    /// One or more replications hit the draw cap; the point is aborted
    /// because dropping such replications would bias every statistic.
    CapExceeded { failed_replications: u64, reps: u64 },
}

impl fmt::Display for TrialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialError::Domain(msg) => write!(f, "domain error: {msg}"),
            TrialError::CapExceeded {
                failed_replications,
                reps,
            } => write!(
                f,
                "{failed_replications} of {reps} replications hit the draw cap"
            ),
        }
    }
}

impl std::error::Error for TrialError {}

impl From<AnalysisError> for TrialError {
    fn from(e: AnalysisError) -> Self {
        TrialError::Domain(e.to_string())
    }
}

fn check_trial_args(p: f64, r: u32, reps: u64, workers: usize) -> Result<(), TrialError> {
    if !(p > 0.0 && p < 1.0 && p.is_finite()) {
        return Err(TrialError::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    if r < 2 {
        return Err(TrialError::Domain(format!("r = {r} must be at least 2")));
    }
    if reps < 2 {
        return Err(TrialError::Domain(format!(
            "reps = {reps} must be at least 2"
        )));
    }
    if workers == 0 {
        return Err(TrialError::Domain("workers must be at least 1".to_string()));
    }
    Ok(())
}

/// The fixed partition of `0..reps` into at most [`BLOCKS`] contiguous,
/// near-equal blocks.
fn block_ranges(reps: u64) -> Vec<(u64, u64)> {
    let blocks = BLOCKS.min(reps);
    (0..blocks)
        .map(|b| (b * reps / blocks, (b + 1) * reps / blocks))
        .collect()
}

/// One estimator replication. Only cap exhaustion is survivable here: PRNG
/// sources cannot be exhausted and the arguments were validated upfront.
fn run_replication(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    seed: u64,
    cap: u64,
) -> Result<(f64, u64), SourceError> {
    let mut source = ObservationSource::prng(p, seed)
        .expect("validated p must construct a source")
        .with_cap(cap)
        .expect("caps are validated upstream");
    let result = match kind {
        EstimatorKind::Odds => estimate_odds(&mut source, r).map(|est| (est.value, est.n_total)),
        EstimatorKind::LogOdds => {
            estimate_log_odds(&mut source, r).map(|est| (est.value, est.n_total))
        }
    };
    result.map_err(|e| match e {
        EstimateError::Source(src) => src,
        EstimateError::Precondition(msg) => {
            unreachable!("validated arguments cannot violate preconditions: {msg}")
        }
    })
}

struct BlockOutcome {
    stats: TrialStats,
    cap_failures: u64,
}

fn run_block(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    range: (u64, u64),
    master_seed: u64,
    cap: u64,
) -> BlockOutcome {
    let mut stats = TrialStats::new();
    let mut cap_failures = 0u64;
    for i in range.0..range.1 {
        match run_replication(kind, p, r, derive_child_seed(master_seed, i), cap) {
            Ok((value, n_total)) => stats.push(value, n_total as f64),
            Err(SourceError::CapExceeded { .. }) => cap_failures += 1,
            Err(other) => unreachable!("PRNG sources only fail via the cap: {other}"),
        }
    }
    BlockOutcome {
        stats,
        cap_failures,
    }
}

/// Runs `f` over `0..n_jobs` on up to `workers` threads, returning results
/// in job order regardless of scheduling.
fn parallel_map<T, F>(workers: usize, n_jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if workers <= 1 || n_jobs <= 1 {
        return (0..n_jobs).map(f).collect();
    }
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n_jobs).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n_jobs) {
            scope.spawn(|| loop {
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= n_jobs {
                    break;
                }
                let out = f(job);
                slots.lock().unwrap()[job] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every job ran"))
        .collect()
}

fn trial_blocks_with_cap(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    reps: u64,
    master_seed: u64,
    workers: usize,
    cap: u64,
) -> Result<Vec<TrialStats>, TrialError> {
    check_trial_args(p, r, reps, workers)?;
    let ranges = block_ranges(reps);
    let outcomes = parallel_map(workers, ranges.len(), |b| {
        run_block(kind, p, r, ranges[b], master_seed, cap)
    });
    let failed: u64 = outcomes.iter().map(|o| o.cap_failures).sum();
    if failed > 0 {
        return Err(TrialError::CapExceeded {
            failed_replications: failed,
            reps,
        });
    }
    Ok(outcomes.into_iter().map(|o| o.stats).collect())
}

/// Per-block statistics for `reps` replications of the `kind` estimator at
/// `(p, r)`. The block partition and every value are independent of
/// `workers`.
pub fn run_trial_blocks(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    reps: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<TrialStats>, TrialError> {
    trial_blocks_with_cap(kind, p, r, reps, master_seed, workers, crate::default_cap())
}

/// Replicated statistics of the `kind` estimator at `(p, r)`: block results
/// merged in ascending block order.
pub fn run_trials(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    reps: u64,
    master_seed: u64,
    workers: usize,
) -> Result<TrialStats, TrialError> {
    let blocks = run_trial_blocks(kind, p, r, reps, master_seed, workers)?;
    Ok(merge_all(&blocks, None))
}

fn merge_all(blocks: &[TrialStats], skip: Option<usize>) -> TrialStats {
    let mut acc = TrialStats::new();
    for (i, b) in blocks.iter().enumerate() {
        if Some(i) != skip {
            acc = acc.merge(b);
        }
    }
    acc
}

/// Monte Carlo efficiency measurement at one `(kind, p, r)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    pub kind: EstimatorKind,
    pub p: f64,
    pub r: u32,
    pub reps: u64,
    /// Empirical mean of the estimates.
    pub mean_estimate: f64,
    /// The estimated parameter's true value at `p`.
    pub true_value: f64,
    /// Sample variance of the estimates.
    pub sample_var: f64,
    /// Empirical mean sample size (reported for cross-checking; the
    /// efficiency denominator uses the closed form).
    pub mean_n: f64,
    /// Closed-form `E[N]`.
    pub expected_n: f64,
    /// Wolfowitz bound over (sample variance x closed-form `E[N]`).
    pub efficiency: f64,
    /// Pointwise efficiency lower bound from the analysis module.
    pub lower_bound: f64,
    /// Jackknife standard error of `efficiency` over the block partition.
    pub stderr_efficiency: f64,
    /// Standard error of `mean_estimate`.
    pub stderr_mean_estimate: f64,
    /// Standard error of `mean_n`.
    pub stderr_mean_n: f64,
}

/// Measures empirical efficiency at `(kind, p, r)` with `reps`
/// replications. The efficiency uses the sample variance in place of the
/// true variance and the closed-form `E[N]`; its standard error is the
/// delete-one-block jackknife over the fixed block partition.
pub fn efficiency_estimate(
    kind: EstimatorKind,
    p: f64,
    r: u32,
    reps: u64,
    master_seed: u64,
    workers: usize,
) -> Result<EfficiencyPoint, TrialError> {
    let blocks = run_trial_blocks(kind, p, r, reps, master_seed, workers)?;
    let total = merge_all(&blocks, None);

    let efficiency_of = |stats: &TrialStats| -> Result<f64, TrialError> {
        Ok(kind.efficiency_from_variance(r, p, stats.variance_estimate())?)
    };
    let efficiency = efficiency_of(&total)?;

    let n_blocks = blocks.len();
    let mut jack = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        jack.push(efficiency_of(&merge_all(&blocks, Some(b)))?);
    }
    let jack_mean = jack.iter().sum::<f64>() / n_blocks as f64;
    let ss: f64 = jack.iter().map(|v| (v - jack_mean) * (v - jack_mean)).sum();
    let stderr_efficiency = ((n_blocks as f64 - 1.0) / n_blocks as f64 * ss).sqrt();

    Ok(EfficiencyPoint {
        kind,
        p,
        r,
        reps,
        mean_estimate: total.mean_estimate,
        true_value: kind.true_value(p),
        sample_var: total.variance_estimate(),
        mean_n: total.mean_n,
        expected_n: kind.expected_samples(r, p)?,
        efficiency,
        lower_bound: kind.efficiency_lower_bound(r, p)?,
        stderr_efficiency,
        stderr_mean_estimate: total.stderr_mean_estimate(),
        stderr_mean_n: total.stderr_mean_n(),
    })
}

/// One grid point of a sweep; failed points carry their error instead of
/// aborting the remainder of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub kind: EstimatorKind,
    pub r: u32,
    pub p: f64,
    pub reps: u64,
    pub result: Result<EfficiencyPoint, TrialError>,
}

/// Evaluates the Cartesian product `r_list x p_grid` in row-major order
/// (`r` outer, `p` inner). Every point uses `master_seed` directly, so each
/// point's result depends only on `(kind, p, r, reps, master_seed)` and a
/// singleton sweep equals [`efficiency_estimate`].
pub fn sweep(
    kind: EstimatorKind,
    p_grid: &[f64],
    r_list: &[u32],
    reps: u64,
    master_seed: u64,
    workers: usize,
) -> Vec<SweepPoint> {
    let mut points = Vec::with_capacity(p_grid.len() * r_list.len());
    for &r in r_list {
        for &p in p_grid {
            points.push(SweepPoint {
                kind,
                r,
                p,
                reps,
                result: efficiency_estimate(kind, p, r, reps, master_seed, workers),
            });
        }
    }
    points
}
