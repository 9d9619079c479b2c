//! Guaranteed-accuracy sequential estimation of odds and log odds from
//! Bernoulli observations.
//!
//! The estimators draw observations by inverse binomial sampling — keep
//! observing until a target number of successes (or failures) has occurred —
//! and are unbiased with a variance bound that holds for *every* success
//! probability `p` in (0, 1): relative variance below `1/(r-1)` for the odds
//! `p/(1-p)`, and variance below a closed-form uniform bound for the natural
//! log odds. The crate bundles:
//!
//! - [`source`]: reproducible Bernoulli observation streams (seeded PRNG,
//!   fixed sequences, bit files), with draw caps;
//! - [`sampling`]: the IBS runs and point estimators;
//! - [`analysis`]: closed-form variance/efficiency bounds, the sample-size
//!   planner, and deterministic verification oracles (truncated series,
//!   exact rationals, inequality sweeps);
//! - [`montecarlo`]: a replicated simulation harness measuring empirical
//!   bias, variance and efficiency, deterministic for any worker count;
//! - [`verify`]: the oracle suites wired together as pass/fail checks.

pub mod analysis;
pub mod montecarlo;
pub mod sampling;
pub mod source;
pub mod verify;

pub use analysis::{plan_r, AccuracyPlan, AnalysisError};
pub use montecarlo::{
    efficiency_estimate, run_trials, sweep, EfficiencyPoint, SweepPoint, TrialError, TrialStats,
};
pub use sampling::{
    estimate_inv_q, estimate_log_odds, estimate_log_p, estimate_odds, estimate_p, harmonic,
    run_ibs, EstimateError, IbsRun, LogOddsEstimate, OddsEstimate,
};
pub use source::{
    default_cap, derive_child_seed, Observation, ObservationSource, SourceError, Target,
};

use std::fmt;

/// Which of the two sequential estimators is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Estimate `p/(1-p)`; accuracy figures are relative variances.
    Odds,
    /// Estimate `log(p/(1-p))`; accuracy figures are plain variances.
    LogOdds,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Odds => write!(f, "odds"),
            EstimatorKind::LogOdds => write!(f, "logodds"),
        }
    }
}
