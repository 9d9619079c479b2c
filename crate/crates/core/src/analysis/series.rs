//! Truncated-series oracle over the negative binomial distribution.
//!
//! `series_expectation` evaluates `E[g(N)]` for `N ~ NB(r, p)` by direct
//! summation, with an explicit geometric bound on the truncated tail. It is
//! the deterministic reference that the closed-form identities and variance
//! bounds are checked against, so its only error source — truncation — is
//! controlled and reported.

use super::pmf::neg_binomial_pmf;
use super::{check_probability, check_r, AnalysisError};
use crate::sampling::harmonic;

/// Hard budget on summation length.
const MAX_TERMS: u64 = 10_000_000;

/// The summand must fall this many decades below its running peak before
/// truncation is allowed.
const DECAY_DECADES: f64 = 1e-3;

/// Safety factor applied to the requested tail tolerance.
const TAIL_SAFETY: f64 = 8.0;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Result of a truncated-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    /// The truncated sum.
    pub value: f64,
    /// Number of pmf terms summed (truncation point is `r + terms - 1`).
    pub terms: u64,
    /// Bound on the absolute contribution of the discarded tail.
    pub tail_bound: f64,
}

/// Evaluates `E[g(N)] = sum over n >= r of pmf(n) g(n)` for `N ~ NB(r, p)`.
///
/// `g` is called once per `n`, in ascending order, so it may carry state
/// (e.g. an incrementally maintained harmonic number). The caller asserts
/// that `|g|` is eventually bounded by a polynomial of degree
/// `poly_degree`; the truncation rule folds that growth into its geometric
/// tail bound. Summation stops once the tail-contribution bound is safely
/// below `tail_tol`, at least half the probability mass has been covered,
/// and the summand has decayed three decades from its running peak.
pub fn series_expectation<G: FnMut(u64) -> f64>(
    r: u32,
    p: f64,
    mut g: G,
    poly_degree: u32,
    tail_tol: f64,
) -> Result<SeriesResult, AnalysisError> {
    check_probability(p)?;
    check_r(r, 1, "series_expectation")?;
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(AnalysisError::Domain(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }

    let r64 = u64::from(r);
    let q = 1.0 - p;
    let mut sum = KahanSum::default();
    let mut mass = KahanSum::default();
    let mut g_window = [0.0f64; 32];
    let mut peak_summand = 0.0f64;

    let mut n = r64;
    loop {
        let pmf = neg_binomial_pmf(r, p, n)?;
        let gn = g(n);
        sum.add(pmf * gn);
        mass.add(pmf);
        g_window[(n - r64) as usize % g_window.len()] = gn.abs();

        // Envelope for |g| near n: window max, clamped away from zero so the
        // tail bound stays meaningful when g vanishes locally.
        let g_env = g_window
            .iter()
            .fold(f64::MIN_POSITIVE, |acc, &v| acc.max(v));
        let summand = pmf * g_env;
        peak_summand = peak_summand.max(summand);

        // pmf(n+1)/pmf(n) = (1-p) n / (n+1-r), non-increasing in n; the
        // (1 + 1/n)^d factor absorbs polynomial growth of g per step.
        let ratio = q * n as f64 / (n + 1 - r64) as f64;
        let rho = ratio * (1.0 + 1.0 / n as f64).powi(poly_degree as i32);
        if rho < 1.0 && mass.value() >= 0.5 && summand <= peak_summand * DECAY_DECADES {
            let tail_bound = pmf * g_env * rho / (1.0 - rho);
            if tail_bound * TAIL_SAFETY < tail_tol {
                return Ok(SeriesResult {
                    value: sum.value(),
                    terms: n - r64 + 1,
                    tail_bound,
                });
            }
        }

        n += 1;
        if n - r64 >= MAX_TERMS {
            return Err(AnalysisError::NoConvergence {
                max_terms: MAX_TERMS,
            });
        }
    }
}

/// Mean and variance of an estimator, both from the series oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// `E[1/N]` for `N ~ NB(r, p)`.
pub fn nb_mean_inverse(r: u32, p: f64, tail_tol: f64) -> Result<f64, AnalysisError> {
    Ok(series_expectation(r, p, |n| 1.0 / n as f64, 0, tail_tol)?.value)
}

/// Series-oracle mean and variance of the odds estimator at target count
/// `r >= 2`: the product of the two independent component runs
/// (`r + 1` successes, `r - 1` failures).
pub fn odds_estimator_moments(r: u32, p: f64, tail_tol: f64) -> Result<Moments, AnalysisError> {
    check_r(r, 2, "odds_estimator_moments")?;
    check_probability(p)?;
    let r1 = r + 1;
    let r2 = r - 1;
    // p1_hat = (r1 - 1) / (n - 1) = r / (n - 1)
    let g1 = |n: u64| f64::from(r) / (n - 1) as f64;
    // d2_hat = n / r2
    let g2 = |n: u64| n as f64 / f64::from(r2);
    let e1 = series_expectation(r1, p, g1, 0, tail_tol)?.value;
    let e1_sq = series_expectation(r1, p, |n| g1(n) * g1(n), 0, tail_tol)?.value;
    let e2 = series_expectation(r2, 1.0 - p, g2, 1, tail_tol)?.value;
    let e2_sq = series_expectation(r2, 1.0 - p, |n| g2(n) * g2(n), 2, tail_tol)?.value;
    let mean = e1 * e2;
    Ok(Moments {
        mean,
        variance: e1_sq * e2_sq - mean * mean,
    })
}

/// Builds the log-probability estimator `-H_{n-1} + H_{r-1}` as a stateful
/// closure valid for ascending single-visit evaluation starting at `n = r`.
fn logp_estimator_fn(r: u32) -> impl FnMut(u64) -> f64 {
    let h_r_minus_1 = harmonic(u64::from(r) - 1);
    let mut h = h_r_minus_1; // H_{n-1}, maintained incrementally
    let mut prev_n = None;
    move |n: u64| {
        match prev_n {
            None => {
                debug_assert_eq!(n, u64::from(r));
            }
            Some(prev) => {
                debug_assert_eq!(n, prev + 1);
                h += 1.0 / (n - 1) as f64;
            }
        }
        prev_n = Some(n);
        -h + h_r_minus_1
    }
}

/// Series-oracle mean and variance of the log-probability estimator
/// `-H_{N-1} + H_{r-1}` for `N ~ NB(r, p)`, `r >= 2`.
///
/// The variance is the centered second moment about the series mean
/// (two passes), avoiding cancellation against the analytic `log p`.
pub fn logp_estimator_moments(r: u32, p: f64, tail_tol: f64) -> Result<Moments, AnalysisError> {
    check_r(r, 2, "logp_estimator_moments")?;
    check_probability(p)?;
    let mean = series_expectation(r, p, logp_estimator_fn(r), 2, tail_tol)?.value;
    let mut est = logp_estimator_fn(r);
    let variance = series_expectation(
        r,
        p,
        move |n| {
            let d = est(n) - mean;
            d * d
        },
        2,
        tail_tol,
    )?
    .value;
    Ok(Moments { mean, variance })
}

/// Series-oracle mean and variance of the log-odds estimator at target
/// count `r >= 2`: difference of two independent log-probability runs
/// (`r` successes at `p`, `r` failures at `1 - p`).
pub fn logodds_estimator_moments(r: u32, p: f64, tail_tol: f64) -> Result<Moments, AnalysisError> {
    let m1 = logp_estimator_moments(r, p, tail_tol)?;
    let m2 = logp_estimator_moments(r, 1.0 - p, tail_tol)?;
    Ok(Moments {
        mean: m1.mean - m2.mean,
        variance: m1.variance + m2.variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn mean_of_n_matches_r_over_p() {
        // E[N] = r/p; g(n) = n.
        let res = series_expectation(5, 0.5, |n| n as f64, 1, TOL).unwrap();
        assert!((res.value - 10.0).abs() < 1e-9, "got {}", res.value);
        assert!(res.tail_bound < TOL);
    }

    #[test]
    fn mean_inverse_n_minus_1() {
        // E[1/(N-1)] = p/(r-1); r=3, p=0.4 -> 0.2.
        let res = series_expectation(3, 0.4, |n| 1.0 / (n - 1) as f64, 0, TOL).unwrap();
        assert!((res.value - 0.2).abs() < 1e-9, "got {}", res.value);
    }

    #[test]
    fn variance_of_n() {
        // Var[N] = r(1-p)/p^2; r=4, p=0.25 -> 48.
        let mu = 4.0 / 0.25;
        let res = series_expectation(4, 0.25, |n| (n as f64 - mu).powi(2), 2, 1e-9).unwrap();
        assert!((res.value - 48.0).abs() < 1e-6, "got {}", res.value);
    }

    #[test]
    fn normalization_within_1e12() {
        for r in [1u32, 2, 5, 10, 26] {
            for i in 1..=9u32 {
                let p = f64::from(i) * 0.1;
                let res = series_expectation(r, p, |_| 1.0, 0, 1e-13).unwrap();
                assert!(
                    (res.value - 1.0).abs() < 1e-12,
                    "r={r} p={p}: sum = {}",
                    res.value
                );
            }
        }
    }

    #[test]
    fn odds_moments_unbiased_at_grid_point() {
        let m = odds_estimator_moments(5, 0.25, TOL).unwrap();
        let omega = 0.25 / 0.75;
        assert!((m.mean - omega).abs() < 1e-9, "mean = {}", m.mean);
        assert!(m.variance > 0.0);
    }

    #[test]
    fn success_count_estimator_is_unbiased_for_p() {
        // E[(r-1)/(N-1)] = p at r=3, p=0.4.
        let res = series_expectation(3, 0.4, |n| 2.0 / (n - 1) as f64, 0, TOL).unwrap();
        assert!((res.value - 0.4).abs() < 1e-9, "got {}", res.value);
    }

    #[test]
    fn failure_count_estimator_is_unbiased_for_inv_q() {
        // E[N/r] over a failures run at p=0.6 is 1/(1-p): NB(4, 0.4) mean/4.
        let res = series_expectation(4, 1.0 - 0.6, |n| n as f64 / 4.0, 1, TOL).unwrap();
        assert!((res.value - 2.5).abs() < 1e-9, "got {}", res.value);
    }

    #[test]
    fn logp_moments_unbiased() {
        let m = logp_estimator_moments(4, 0.3, TOL).unwrap();
        assert!((m.mean - 0.3_f64.ln()).abs() < 1e-9, "mean = {}", m.mean);
    }

    #[test]
    fn logodds_moments_unbiased_and_symmetric() {
        let m = logodds_estimator_moments(6, 0.25, TOL).unwrap();
        let lambda = (0.25_f64 / 0.75).ln();
        assert!((m.mean - lambda).abs() < 1e-9, "mean = {}", m.mean);
        let m_flip = logodds_estimator_moments(6, 0.75, TOL).unwrap();
        assert!((m.variance - m_flip.variance).abs() < 1e-12);
        assert!((m.mean + m_flip.mean).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(series_expectation(0, 0.5, |_| 1.0, 0, TOL).is_err());
        assert!(series_expectation(2, 1.5, |_| 1.0, 0, TOL).is_err());
        assert!(series_expectation(2, 0.5, |_| 1.0, 0, 0.0).is_err());
        assert!(odds_estimator_moments(1, 0.5, TOL).is_err());
    }

    #[test]
    fn extreme_p_does_not_converge_in_budget() {
        // Mass sits near n ~ r/p = 2e9, far beyond the term budget.
        let res = series_expectation(2, 1e-9, |n| n as f64, 1, TOL);
        assert!(matches!(res, Err(AnalysisError::NoConvergence { .. })));
    }
}
