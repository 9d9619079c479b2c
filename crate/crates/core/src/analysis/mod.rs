//! Closed-form bounds, the sample-size planner, and deterministic
//! verification oracles.
//!
//! Everything here is pure and reentrant: negative binomial pmf and
//! truncated-series expectations, the variance/efficiency bounds of the two
//! sequential estimators, the accuracy planner, an exact-rational oracle for
//! the harmonic-number form of the log-probability estimator, and the
//! harmonic-difference / squared-log inequalities used by the variance
//! proofs.

mod bounds;
mod degroot;
mod inequalities;
mod pmf;
mod series;

pub use bounds::{
    efficiency_lower_bound_logodds, efficiency_lower_bound_odds,
    efficiency_uniform_lower_bound_logodds, efficiency_uniform_lower_bound_odds,
    expected_samples_logodds, expected_samples_odds, plan_r, uniform_var_bound_logodds,
    uniform_var_bound_odds, var_bound_logodds, var_bound_logp, var_bound_odds,
    wolfowitz_product_bound, AccuracyPlan,
};
pub use degroot::{degroot_oracle, harmonic_diff_rational};
pub use inequalities::{harmonic_diff_bounds, topsoe_check, HarmonicBoundPair};
pub use pmf::neg_binomial_pmf;
pub use series::{
    logodds_estimator_moments, logp_estimator_moments, nb_mean_inverse, odds_estimator_moments,
    series_expectation, Moments, SeriesResult,
};

use std::fmt;

/// Errors from the analytic operations.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// An argument was outside the operation's domain.
    Domain(String),
    /// A truncated series failed to converge within the term budget.
    NoConvergence { max_terms: u64 },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::Domain(msg) => write!(f, "domain error: {msg}"),
            AnalysisError::NoConvergence { max_terms } => {
                write!(f, "series did not converge within {max_terms} terms")
            }
        }
    }
}

impl std::error::Error for AnalysisError {}

pub(crate) fn check_probability(p: f64) -> Result<(), AnalysisError> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::Domain(format!(
            "probability {p} must lie in (0, 1)"
        )))
    }
}

pub(crate) fn check_r(r: u32, min: u32, what: &str) -> Result<(), AnalysisError> {
    if r >= min {
        Ok(())
    } else {
        Err(AnalysisError::Domain(format!(
            "{what} requires r >= {min}, got {r}"
        )))
    }
}
