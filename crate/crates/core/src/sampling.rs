//! Inverse binomial sampling and the point estimators built on it.
//!
//! An IBS run draws observations until the `r`-th occurrence of a target
//! outcome. The number of draws `N` is negative-binomial, and simple
//! functions of `(r, N)` give unbiased estimators of `p`, `1/(1-p)`,
//! `log p`, the odds `p/(1-p)`, and the log odds.
//!
//! Each composite estimator performs its two runs on disjoint, consecutive
//! segments of a single source: the first run completes fully before the
//! second starts. The two sample counts are therefore independent when the
//! source is an i.i.d. Bernoulli stream.

use crate::source::{ObservationSource, SourceError, Target};
use std::fmt;

/// Record of one inverse-binomial-sampling run: `n` observations were
/// consumed to see `r` occurrences of `target`, the `n`-th being one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IbsRun {
    /// Target occurrence count.
    pub r: u32,
    /// Which outcome was counted.
    pub target: Target,
    /// Observations consumed; always `n >= r`.
    pub n: u64,
}

/// Odds estimate `p1_hat * d2_hat` with its two component runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddsEstimate {
    /// The estimate of `p / (1-p)`; always nonnegative.
    pub value: f64,
    /// Run until `r + 1` successes; yields `p1_hat = r / (n1 - 1)`.
    pub run1: IbsRun,
    /// Run until `r - 1` failures; yields `d2_hat = n2 / (r - 1)`.
    pub run2: IbsRun,
    /// Total observations consumed by both runs.
    pub n_total: u64,
}

/// Log-odds estimate `-H_{n1-1} + H_{n2-1}` with its two component runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogOddsEstimate {
    /// The estimate of `log(p / (1-p))`.
    pub value: f64,
    /// Run until `r` successes.
    pub run1: IbsRun,
    /// Run until `r` failures.
    pub run2: IbsRun,
    /// Total observations consumed by both runs.
    pub n_total: u64,
}

/// Errors from the estimation operations.
#[derive(Debug)]
pub enum EstimateError {
    /// An argument violated an estimator precondition.
    Precondition(&'static str),
    /// The observation source failed (exhausted or cap exceeded).
    Source(SourceError),
}

impl fmt::Display for EstimateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimateError::Precondition(msg) => write!(f, "precondition violation: {msg}"),
            EstimateError::Source(e) => write!(f, "source error: {e}"),
        }
    }
}

impl std::error::Error for EstimateError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            EstimateError::Source(e) => Some(e),
            EstimateError::Precondition(_) => None,
        }
    }
}

impl From<SourceError> for EstimateError {
    fn from(e: SourceError) -> Self {
        EstimateError::Source(e)
    }
}

/// The `n`-th harmonic number `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
///
/// Accumulated in ascending `k`; the incremental tracking done during
/// sampling adds terms in the same order, so both paths agree bit for bit.
pub fn harmonic(n: u64) -> f64 {
    let mut h = 0.0;
    for k in 1..=n {
        h += 1.0 / k as f64;
    }
    h
}

/// Runs IBS until the `r`-th occurrence of `target`, also tracking
/// `H_{n-1}` incrementally (one add per observation).
fn run_ibs_tracked(
    source: &mut ObservationSource,
    r: u32,
    target: Target,
) -> Result<(IbsRun, f64), EstimateError> {
    if r < 1 {
        return Err(EstimateError::Precondition("run_ibs requires r >= 1"));
    }
    let mut hits = 0u32;
    let mut n = 0u64;
    let mut h = 0.0; // H_{n-1}
    loop {
        let obs = source.next_observation()?;
        n += 1;
        if n >= 2 {
            h += 1.0 / (n - 1) as f64;
        }
        if target.matches(obs) {
            hits += 1;
            if hits == r {
                return Ok((IbsRun { r, target, n }, h));
            }
        }
    }
}

/// Draws observations until the `r`-th occurrence of `target` and records
/// the number of draws consumed.
pub fn run_ibs(
    source: &mut ObservationSource,
    r: u32,
    target: Target,
) -> Result<IbsRun, EstimateError> {
    run_ibs_tracked(source, r, target).map(|(run, _)| run)
}

/// Unbiased estimate of `p` from a successes run: `(r - 1) / (n - 1)`.
/// Requires `r >= 2`.
pub fn estimate_p(run: &IbsRun) -> Result<f64, EstimateError> {
    if run.target != Target::Successes {
        return Err(EstimateError::Precondition(
            "estimate_p requires a run counting successes",
        ));
    }
    if run.r < 2 {
        return Err(EstimateError::Precondition("estimate_p requires r >= 2"));
    }
    Ok((run.r - 1) as f64 / (run.n - 1) as f64)
}

/// Unbiased estimate of `1 / (1-p)` from a failures run: `n / r`.
pub fn estimate_inv_q(run: &IbsRun) -> Result<f64, EstimateError> {
    if run.target != Target::Failures {
        return Err(EstimateError::Precondition(
            "estimate_inv_q requires a run counting failures",
        ));
    }
    if run.r < 1 {
        return Err(EstimateError::Precondition(
            "estimate_inv_q requires r >= 1",
        ));
    }
    Ok(run.n as f64 / run.r as f64)
}

/// Unbiased estimate of `log p` from a successes run:
/// `-H_{n-1} + H_{r-1}`. Requires `r >= 2`; zero exactly when `n == r`.
pub fn estimate_log_p(run: &IbsRun) -> Result<f64, EstimateError> {
    if run.target != Target::Successes {
        return Err(EstimateError::Precondition(
            "estimate_log_p requires a run counting successes",
        ));
    }
    if run.r < 2 {
        return Err(EstimateError::Precondition(
            "estimate_log_p requires r >= 2",
        ));
    }
    Ok(-harmonic(run.n - 1) + harmonic(u64::from(run.r) - 1))
}

/// Estimates the odds `p / (1-p)` with guaranteed relative variance below
/// `1 / (r - 1)`.
///
/// Runs IBS twice on consecutive segments of `source`: first until `r + 1`
/// successes, then until `r - 1` failures. Requires `r >= 2`.
pub fn estimate_odds(
    source: &mut ObservationSource,
    r: u32,
) -> Result<OddsEstimate, EstimateError> {
    if r < 2 {
        return Err(EstimateError::Precondition("estimate_odds requires r >= 2"));
    }
    let run1 = run_ibs(source, r + 1, Target::Successes)?;
    let run2 = run_ibs(source, r - 1, Target::Failures)?;
    let p1 = estimate_p(&run1)?;
    let d2 = estimate_inv_q(&run2)?;
    Ok(OddsEstimate {
        value: p1 * d2,
        run1,
        run2,
        n_total: run1.n + run2.n,
    })
}

/// Estimates the log odds `log(p / (1-p))` with guaranteed variance below
/// the uniform bound of [`crate::analysis::uniform_var_bound_logodds`].
///
/// Runs IBS twice on consecutive segments of `source`: first until `r`
/// successes, then until `r` failures. Requires `r >= 2`.
pub fn estimate_log_odds(
    source: &mut ObservationSource,
    r: u32,
) -> Result<LogOddsEstimate, EstimateError> {
    if r < 2 {
        return Err(EstimateError::Precondition(
            "estimate_log_odds requires r >= 2",
        ));
    }
    let (run1, h1) = run_ibs_tracked(source, r, Target::Successes)?;
    let (run2, h2) = run_ibs_tracked(source, r, Target::Failures)?;
    Ok(LogOddsEstimate {
        value: -h1 + h2,
        run1,
        run2,
        n_total: run1.n + run2.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::Observation::{Failure as F, Success as S};

    fn fixed(seq: &[crate::source::Observation]) -> ObservationSource {
        ObservationSource::fixed(seq.to_vec())
    }

    #[test]
    fn run_ibs_counts_by_hand() {
        let mut src = fixed(&[S, S, S]);
        let run = run_ibs(&mut src, 3, Target::Successes).unwrap();
        assert_eq!(run.n, 3);

        let mut src = fixed(&[F, S, F, S]);
        let run = run_ibs(&mut src, 2, Target::Successes).unwrap();
        assert_eq!(run.n, 4);
    }

    #[test]
    fn run_ibs_propagates_source_errors() {
        let mut src = fixed(&[F, F]);
        assert!(matches!(
            run_ibs(&mut src, 1, Target::Successes),
            Err(EstimateError::Source(SourceError::Exhausted { .. }))
        ));
        let mut src = ObservationSource::prng(0.5, 3)
            .unwrap()
            .with_cap(4)
            .unwrap();
        assert!(matches!(
            run_ibs(&mut src, 1000, Target::Successes),
            Err(EstimateError::Source(SourceError::CapExceeded { .. }))
        ));
    }

    #[test]
    fn estimate_p_arithmetic_and_preconditions() {
        let run = IbsRun {
            r: 3,
            target: Target::Successes,
            n: 3,
        };
        assert_eq!(estimate_p(&run).unwrap(), 1.0);
        let run = IbsRun {
            r: 3,
            target: Target::Successes,
            n: 5,
        };
        assert_eq!(estimate_p(&run).unwrap(), 0.5);

        let bad = IbsRun {
            r: 1,
            target: Target::Successes,
            n: 4,
        };
        assert!(matches!(
            estimate_p(&bad),
            Err(EstimateError::Precondition(_))
        ));
        let bad = IbsRun {
            r: 3,
            target: Target::Failures,
            n: 5,
        };
        assert!(matches!(
            estimate_p(&bad),
            Err(EstimateError::Precondition(_))
        ));
    }

    #[test]
    fn estimate_inv_q_arithmetic_and_preconditions() {
        let run = IbsRun {
            r: 1,
            target: Target::Failures,
            n: 1,
        };
        assert_eq!(estimate_inv_q(&run).unwrap(), 1.0);
        let run = IbsRun {
            r: 2,
            target: Target::Failures,
            n: 5,
        };
        assert_eq!(estimate_inv_q(&run).unwrap(), 2.5);

        let bad = IbsRun {
            r: 2,
            target: Target::Successes,
            n: 5,
        };
        assert!(matches!(
            estimate_inv_q(&bad),
            Err(EstimateError::Precondition(_))
        ));
    }

    #[test]
    fn harmonic_small_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_log_p_values() {
        let run = |n| IbsRun {
            r: 2,
            target: Target::Successes,
            n,
        };
        assert_eq!(estimate_log_p(&run(2)).unwrap(), 0.0);
        assert_eq!(estimate_log_p(&run(3)).unwrap(), -0.5);
        assert!((estimate_log_p(&run(4)).unwrap() - (-5.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn estimate_log_p_zero_iff_n_equals_r_and_decreasing() {
        for r in [2u32, 3, 7] {
            let mut prev = f64::INFINITY;
            for n in u64::from(r)..u64::from(r) + 100 {
                let v = estimate_log_p(&IbsRun {
                    r,
                    target: Target::Successes,
                    n,
                })
                .unwrap();
                assert_eq!(v == 0.0, n == u64::from(r));
                assert!(v < prev, "not strictly decreasing at r={r}, n={n}");
                prev = v;
            }
        }
    }

    #[test]
    fn odds_hand_trace_ssssf() {
        let mut src = ObservationSource::from_bit_str("1110").unwrap();
        let est = estimate_odds(&mut src, 2).unwrap();
        assert_eq!(est.run1.n, 3);
        assert_eq!(est.run2.n, 1);
        assert_eq!(est.value, 1.0);
        assert_eq!(est.n_total, 4);
    }

    #[test]
    fn odds_hand_trace_sfssf() {
        let mut src = ObservationSource::from_bit_str("10110").unwrap();
        let est = estimate_odds(&mut src, 2).unwrap();
        assert_eq!(est.run1.n, 4);
        assert_eq!(est.run2.n, 1);
        assert_eq!(est.value, 2.0 / 3.0);
        assert_eq!(est.n_total, 5);
    }

    #[test]
    fn odds_requires_r_at_least_2() {
        let mut src = fixed(&[S, S, F]);
        assert!(matches!(
            estimate_odds(&mut src, 1),
            Err(EstimateError::Precondition(_))
        ));
    }

    #[test]
    fn log_odds_symmetric_runs_give_zero() {
        let mut src = ObservationSource::from_bit_str("1100").unwrap();
        let est = estimate_log_odds(&mut src, 2).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.n_total, 4);
    }

    #[test]
    fn log_odds_hand_sum() {
        // run1: S,S (n1=2); run2: S,F,F (n2=3); value = H_2 - H_1 = 0.5
        let mut src = ObservationSource::from_bit_str("11100").unwrap();
        let est = estimate_log_odds(&mut src, 2).unwrap();
        assert_eq!(est.run1.n, 2);
        assert_eq!(est.run2.n, 3);
        assert_eq!(est.value, 0.5);
    }

    #[test]
    fn log_odds_value_matches_harmonic_closed_form_exactly() {
        let mut src = ObservationSource::prng(0.37, 99).unwrap();
        for _ in 0..50 {
            let est = estimate_log_odds(&mut src, 5).unwrap();
            let expect = -harmonic(est.run1.n - 1) + harmonic(est.run2.n - 1);
            assert_eq!(est.value, expect);
        }
    }

    #[test]
    fn odds_value_is_positive_and_runs_consistent() {
        let mut src = ObservationSource::prng(0.2, 5).unwrap();
        for _ in 0..200 {
            let est = estimate_odds(&mut src, 3).unwrap();
            assert!(est.value > 0.0);
            assert_eq!(est.run1.r, 4);
            assert_eq!(est.run2.r, 2);
            assert_eq!(est.n_total, est.run1.n + est.run2.n);
            assert!(est.run1.n >= 4 && est.run2.n >= 2);
        }
    }
}
