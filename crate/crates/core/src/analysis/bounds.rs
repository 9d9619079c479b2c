//! Variance and efficiency bounds of the two sequential estimators, the
//! Wolfowitz product bound, and the sample-size planner.
//!
//! Conventions: for the odds estimator all variance figures are *relative*
//! (variance divided by the squared true odds); for the log-odds estimator
//! they are absolute, since the log scale already normalizes relative error.
//! Logs are natural throughout.

use super::{check_probability, check_r, AnalysisError};
use crate::EstimatorKind;

/// Pointwise bound on the relative variance of the odds estimator:
/// `(1/(r-1)) (1 - p(1-p)/(r-1+2p))`. Requires `r >= 2`.
pub fn var_bound_odds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "var_bound_odds")?;
    check_probability(p)?;
    let rf = f64::from(r);
    Ok((1.0 - p * (1.0 - p) / (rf - 1.0 + 2.0 * p)) / (rf - 1.0))
}

/// Uniform (p-independent) bound on the relative variance of the odds
/// estimator: `1/(r-1)`. Requires `r >= 2`.
pub fn uniform_var_bound_odds(r: u32) -> Result<f64, AnalysisError> {
    check_r(r, 2, "uniform_var_bound_odds")?;
    Ok(1.0 / (f64::from(r) - 1.0))
}

/// Expected total sample size of the odds estimator:
/// `(r+1-2p) / (p(1-p))`. Requires `r >= 2`.
pub fn expected_samples_odds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "expected_samples_odds")?;
    check_probability(p)?;
    let rf = f64::from(r);
    Ok((rf + 1.0 - 2.0 * p) / (p * (1.0 - p)))
}

/// Pointwise bound on the variance of the log-probability estimator:
/// `(1/(r-1+p)) ((1 + p/(2r-1) - 1/(4r(2r-1)))(1-p) + p/(4(r-1)))`.
/// Requires `r >= 2`; always below `1/(r-1)`.
pub fn var_bound_logp(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "var_bound_logp")?;
    check_probability(p)?;
    let rf = f64::from(r);
    let inner = (1.0 + p / (2.0 * rf - 1.0) - 1.0 / (4.0 * rf * (2.0 * rf - 1.0))) * (1.0 - p)
        + p / (4.0 * (rf - 1.0));
    Ok(inner / (rf - 1.0 + p))
}

/// Pointwise bound on the variance of the log-odds estimator:
/// `(r^2 - r/4 - 1/4) / ((r-1+p)(r-p)(r-1/2))
///  - (p(1-p)/(r-1/2)^2)(1 - 1/(2r-3))`.
/// Requires `r >= 2`; at `r = 2` the second term vanishes.
pub fn var_bound_logodds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "var_bound_logodds")?;
    check_probability(p)?;
    let rf = f64::from(r);
    let first = (rf * rf - rf / 4.0 - 0.25) / ((rf - 1.0 + p) * (rf - p) * (rf - 0.5));
    let second = p * (1.0 - p) / ((rf - 0.5) * (rf - 0.5)) * (1.0 - 1.0 / (2.0 * rf - 3.0));
    Ok(first - second)
}

/// Uniform bound on the variance of the log-odds estimator:
/// `(1/(r-5/4)) (1 - 7/(4r-1)^2)`. Requires `r >= 2`.
pub fn uniform_var_bound_logodds(r: u32) -> Result<f64, AnalysisError> {
    check_r(r, 2, "uniform_var_bound_logodds")?;
    let rf = f64::from(r);
    let s = 4.0 * rf - 1.0;
    Ok((1.0 - 7.0 / (s * s)) / (rf - 1.25))
}

/// Expected total sample size of the log-odds estimator: `r / (p(1-p))`.
/// Requires `r >= 2`.
pub fn expected_samples_logodds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "expected_samples_logodds")?;
    check_probability(p)?;
    Ok(f64::from(r) / (p * (1.0 - p)))
}

/// Wolfowitz's lower bound on `Var * E[N]` for an unbiased sequential
/// estimator of a differentiable `nu(p)` from Bernoulli observations:
/// `(d nu / d p)^2 p (1-p)`.
pub fn wolfowitz_product_bound(dnu_dp: f64, p: f64) -> Result<f64, AnalysisError> {
    check_probability(p)?;
    Ok(dnu_dp * dnu_dp * p * (1.0 - p))
}

/// Pointwise lower bound on the efficiency of the odds estimator:
/// `((r-1)/(r+1-2p)) (1 + p(1-p)/(r-1+p+p^2))`. Requires `r >= 2`.
pub fn efficiency_lower_bound_odds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    check_r(r, 2, "efficiency_lower_bound_odds")?;
    check_probability(p)?;
    let rf = f64::from(r);
    Ok((rf - 1.0) / (rf + 1.0 - 2.0 * p) * (1.0 + p * (1.0 - p) / (rf - 1.0 + p + p * p)))
}

/// Uniform lower bound on the efficiency of the odds estimator:
/// `(r-1)/(r+1)`. Requires `r >= 2`.
pub fn efficiency_uniform_lower_bound_odds(r: u32) -> Result<f64, AnalysisError> {
    check_r(r, 2, "efficiency_uniform_lower_bound_odds")?;
    let rf = f64::from(r);
    Ok((rf - 1.0) / (rf + 1.0))
}

/// Pointwise lower bound on the efficiency of the log-odds estimator: the
/// reciprocal of `r` times the pointwise variance bound (the Wolfowitz
/// product for the log odds is `1/(p(1-p))` and `E[N] = r/(p(1-p))`).
/// Requires `r >= 2`.
pub fn efficiency_lower_bound_logodds(r: u32, p: f64) -> Result<f64, AnalysisError> {
    let var_bound = var_bound_logodds(r, p)?;
    Ok(1.0 / (f64::from(r) * var_bound))
}

/// Uniform lower bound on the efficiency of the log-odds estimator:
/// `(r - 5/4)/r`. Requires `r >= 2`.
pub fn efficiency_uniform_lower_bound_logodds(r: u32) -> Result<f64, AnalysisError> {
    check_r(r, 2, "efficiency_uniform_lower_bound_logodds")?;
    let rf = f64::from(r);
    Ok((rf - 1.25) / rf)
}

impl EstimatorKind {
    /// The estimated parameter: `p/(1-p)` for odds, its natural log for
    /// log odds.
    pub fn true_value(self, p: f64) -> f64 {
        let omega = p / (1.0 - p);
        match self {
            EstimatorKind::Odds => omega,
            EstimatorKind::LogOdds => omega.ln(),
        }
    }

    /// Derivative of the estimated parameter with respect to `p`.
    pub fn dnu_dp(self, p: f64) -> f64 {
        match self {
            EstimatorKind::Odds => 1.0 / ((1.0 - p) * (1.0 - p)),
            EstimatorKind::LogOdds => 1.0 / (p * (1.0 - p)),
        }
    }

    /// Closed-form expected total sample size at `(r, p)`.
    pub fn expected_samples(self, r: u32, p: f64) -> Result<f64, AnalysisError> {
        match self {
            EstimatorKind::Odds => expected_samples_odds(r, p),
            EstimatorKind::LogOdds => expected_samples_logodds(r, p),
        }
    }

    /// Pointwise variance bound (relative variance for odds, variance for
    /// log odds).
    pub fn pointwise_var_bound(self, r: u32, p: f64) -> Result<f64, AnalysisError> {
        match self {
            EstimatorKind::Odds => var_bound_odds(r, p),
            EstimatorKind::LogOdds => var_bound_logodds(r, p),
        }
    }

    /// Uniform (p-independent) guaranteed variance bound.
    pub fn uniform_bound(self, r: u32) -> Result<f64, AnalysisError> {
        match self {
            EstimatorKind::Odds => uniform_var_bound_odds(r),
            EstimatorKind::LogOdds => uniform_var_bound_logodds(r),
        }
    }

    /// Pointwise lower bound on efficiency.
    pub fn efficiency_lower_bound(self, r: u32, p: f64) -> Result<f64, AnalysisError> {
        match self {
            EstimatorKind::Odds => efficiency_lower_bound_odds(r, p),
            EstimatorKind::LogOdds => efficiency_lower_bound_logodds(r, p),
        }
    }

    /// Uniform lower bound on efficiency.
    pub fn efficiency_uniform_lower_bound(self, r: u32) -> Result<f64, AnalysisError> {
        match self {
            EstimatorKind::Odds => efficiency_uniform_lower_bound_odds(r),
            EstimatorKind::LogOdds => efficiency_uniform_lower_bound_logodds(r),
        }
    }

    /// Efficiency implied by a variance figure at `(r, p)`: the Wolfowitz
    /// product bound divided by `variance * E[N]`, with the closed-form
    /// `E[N]` in the denominator.
    pub fn efficiency_from_variance(
        self,
        r: u32,
        p: f64,
        variance: f64,
    ) -> Result<f64, AnalysisError> {
        let wolfowitz = wolfowitz_product_bound(self.dnu_dp(p), p)?;
        let expected_n = self.expected_samples(r, p)?;
        Ok(wolfowitz / (variance * expected_n))
    }
}

/// Result of sample-size planning: the minimal target count `r` whose
/// uniform guaranteed bound does not exceed the requested accuracy.
///
/// The uniform bounds are strict inequalities, so an achieved bound equal
/// to the target still guarantees the realized (relative) variance is
/// strictly below the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPlan {
    pub kind: EstimatorKind,
    /// Target relative variance (odds) or variance (log odds).
    pub target: f64,
    /// Minimal admissible target count, `r >= 2`.
    pub r: u32,
    /// Uniform bound achieved at `r`; `guaranteed_bound <= target`.
    pub guaranteed_bound: f64,
}

impl AccuracyPlan {
    /// RMSE guarantee implied by the variance bound.
    pub fn guaranteed_rmse(&self) -> f64 {
        self.guaranteed_bound.sqrt()
    }

    /// Expected total sample size at success probability `p`.
    pub fn expected_samples_at(&self, p: f64) -> Result<f64, AnalysisError> {
        self.kind.expected_samples(self.r, p)
    }
}

/// Plans the minimal `r >= 2` with `uniform_bound(r) <= target`, by
/// monotone search. The uniform bounds strictly decrease in `r` and tend to
/// zero, so every positive target is achievable.
pub fn plan_r(kind: EstimatorKind, target: f64) -> Result<AccuracyPlan, AnalysisError> {
    if !target.is_finite() || target <= 0.0 {
        return Err(AnalysisError::Domain(format!(
            "target must be a positive real, got {target}"
        )));
    }
    if target < 2.4e-10 {
        return Err(AnalysisError::Domain(format!(
            "target {target} requires r beyond the supported range"
        )));
    }
    // Both uniform bounds exceed 0.8/r for all r >= 2, so the answer is at
    // least floor(0.8/target); starting there keeps tiny targets cheap
    // without risking an overshoot.
    let mut r = ((0.8 / target) as u32).max(2);
    loop {
        let bound = kind.uniform_bound(r)?;
        if bound <= target {
            return Ok(AccuracyPlan {
                kind,
                target,
                r,
                guaranteed_bound: bound,
            });
        }
        r += 1;
    }
}
