//! Property-based invariants of the sampling runs, the mergeable
//! statistics, and the planner.

use odds_seq::analysis::neg_binomial_pmf;
use odds_seq::montecarlo::TrialStats;
use odds_seq::sampling::{estimate_log_odds, run_ibs, EstimateError};
use odds_seq::source::{Observation, ObservationSource, SourceError, Target};
use odds_seq::{plan_r, EstimatorKind};
use proptest::prelude::*;

fn observations(len: usize) -> impl Strategy<Value = Vec<Observation>> {
    proptest::collection::vec(
        prop_oneof![Just(Observation::Success), Just(Observation::Failure)],
        1..len,
    )
}

fn flip(seq: &[Observation]) -> Vec<Observation> {
    seq.iter()
        .map(|o| match o {
            Observation::Success => Observation::Failure,
            Observation::Failure => Observation::Success,
        })
        .collect()
}

proptest! {
    #[test]
    fn ibs_run_consumes_exactly_r_matches(
        seq in observations(400),
        r in 1u32..8,
        count_failures in proptest::bool::ANY,
    ) {
        let target = if count_failures { Target::Failures } else { Target::Successes };
        let mut src = ObservationSource::fixed(seq.clone());
        match run_ibs(&mut src, r, target) {
            Ok(run) => {
                let consumed = &seq[..run.n as usize];
                let matches = consumed.iter().filter(|&&o| target.matches(o)).count();
                prop_assert_eq!(matches as u32, r);
                prop_assert!(target.matches(*consumed.last().unwrap()));
                prop_assert!(run.n >= u64::from(r));
            }
            Err(EstimateError::Source(SourceError::Exhausted { .. })) => {
                let total = seq.iter().filter(|&&o| target.matches(o)).count();
                prop_assert!((total as u32) < r, "exhausted despite {total} matches");
            }
            Err(other) => prop_assert!(false, "unexpected error: {other}"),
        }
    }

    #[test]
    fn trial_stats_merge_matches_single_pass(
        pairs in proptest::collection::vec((0.01f64..100.0, 1.0f64..1e6), 2..200),
        split in 0usize..200,
    ) {
        let split = split % pairs.len();
        let mut left = TrialStats::new();
        let mut right = TrialStats::new();
        let mut whole = TrialStats::new();
        for (i, &(v, n)) in pairs.iter().enumerate() {
            if i < split { left.push(v, n); } else { right.push(v, n); }
            whole.push(v, n);
        }
        let merged = left.merge(&right);
        let swapped = right.merge(&left);
        prop_assert_eq!(merged.count, whole.count);
        for (a, b) in [
            (merged.mean_estimate, whole.mean_estimate),
            (merged.m2_estimate, whole.m2_estimate),
            (merged.mean_n, whole.mean_n),
            (merged.m2_n, whole.m2_n),
            (merged.mean_estimate, swapped.mean_estimate),
            (merged.m2_estimate, swapped.m2_estimate),
        ] {
            let scale = a.abs().max(b.abs()).max(1e-30);
            prop_assert!((a - b).abs() / scale <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn logodds_sign_flips_under_label_exchange(
        seq in observations(2000),
        r in 2u32..6,
    ) {
        let mut src = ObservationSource::fixed(seq.clone());
        let est = match estimate_log_odds(&mut src, r) {
            Ok(est) => est,
            Err(_) => return Ok(()), // not enough of one symbol; skip
        };
        // Flip every label and swap the two consumed segments: the runs
        // exchange roles, so the estimate must negate exactly.
        let n1 = est.run1.n as usize;
        let n2 = est.run2.n as usize;
        let mut mirrored = flip(&seq[n1..n1 + n2]);
        mirrored.extend(flip(&seq[..n1]));
        let mut src = ObservationSource::fixed(mirrored);
        let mirrored_est = estimate_log_odds(&mut src, r).unwrap();
        prop_assert_eq!(mirrored_est.value, -est.value);
        prop_assert_eq!(mirrored_est.run1.n, est.run2.n);
        prop_assert_eq!(mirrored_est.run2.n, est.run1.n);
    }

    #[test]
    fn planner_is_minimal(target in 1e-5f64..2.0) {
        for kind in [EstimatorKind::Odds, EstimatorKind::LogOdds] {
            let plan = plan_r(kind, target).unwrap();
            prop_assert!(plan.r >= 2);
            prop_assert!(plan.guaranteed_bound <= target);
            if plan.r > 2 {
                // bound(r - 1) must overshoot the target (bound(1) = +inf).
                prop_assert!(kind.uniform_bound(plan.r - 1).unwrap() > target);
            }
        }
    }

    #[test]
    fn pmf_is_a_probability(r in 1u32..40, p in 0.01f64..0.99, offset in 0u64..2000) {
        let n = u64::from(r) + offset;
        let pmf = neg_binomial_pmf(r, p, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&pmf) && pmf.is_finite());
    }
}
