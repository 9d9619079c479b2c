//! Deterministic inequality checks backing the variance proofs: two-sided
//! logarithmic bounds on harmonic-number differences, and the squared-log
//! inequality `log^2 x < 1/x + x - 2`.

use super::{check_r, AnalysisError};

/// Two-sided bound on `H_{n-1} - H_{r-1}` for `n > r`:
///
/// `log((n - 1/2 + beta)/(r - 1/2 + beta)) < H_{n-1} - H_{r-1}
///   < log((n - 1/2)/(r - 1/2))`
///
/// with `beta = (-r + sqrt(r^2 + 1))/2`, which satisfies `0 < beta < 1/(4r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicBoundPair {
    pub r: u32,
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
    pub beta: f64,
}

/// Evaluates both bounds and `beta` at `(r, n)`, `n > r >= 1`.
///
/// `beta` is computed as `1 / (2 (r + sqrt(r^2 + 1)))`, the same quantity
/// without the catastrophic cancellation of the defining form.
pub fn harmonic_diff_bounds(r: u32, n: u64) -> Result<HarmonicBoundPair, AnalysisError> {
    check_r(r, 1, "harmonic_diff_bounds")?;
    if n <= u64::from(r) {
        return Err(AnalysisError::Domain(format!(
            "harmonic_diff_bounds requires n > r; got n = {n}, r = {r}"
        )));
    }
    let rf = f64::from(r);
    let nf = n as f64;
    let beta = 1.0 / (2.0 * (rf + (rf * rf + 1.0).sqrt()));
    debug_assert!(beta > 0.0 && beta < 1.0 / (4.0 * rf));
    Ok(HarmonicBoundPair {
        r,
        n,
        lower: ((nf - 0.5 + beta) / (rf - 0.5 + beta)).ln(),
        upper: ((nf - 0.5) / (rf - 0.5)).ln(),
        beta,
    })
}

/// Whether `log^2 x < 1/x + x - 2` holds at `x`. Requires `x > 0` and
/// `x != 1` (at `x = 1` both sides vanish and strictness fails).
pub fn topsoe_check(x: f64) -> Result<bool, AnalysisError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(AnalysisError::Domain(format!(
            "topsoe_check requires x > 0, got {x}"
        )));
    }
    if x == 1.0 {
        return Err(AnalysisError::Domain(
            "topsoe_check is undefined at x = 1 (both sides are zero)".to_string(),
        ));
    }
    let lhs = x.ln() * x.ln();
    let rhs = 1.0 / x + x - 2.0;
    Ok(lhs < rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::harmonic;

    #[test]
    fn beta_worked_value_for_r2() {
        let pair = harmonic_diff_bounds(2, 3).unwrap();
        // (-2 + sqrt 5)/2
        assert!((pair.beta - 0.118_033_988_749_894_9).abs() < 1e-15);
        assert!(pair.beta < 0.125);
    }

    #[test]
    fn brackets_h2_minus_h1() {
        let pair = harmonic_diff_bounds(2, 3).unwrap();
        assert!(pair.lower < 0.5 && 0.5 < pair.upper, "{pair:?}");
    }

    #[test]
    fn strict_bounds_on_a_sample_grid() {
        for r in [1u32, 2, 7, 40] {
            let mut diff = 0.0; // H_{n-1} - H_{r-1}, accumulated ascending
            for n in u64::from(r) + 1..=200 {
                diff += 1.0 / (n - 1) as f64;
                let pair = harmonic_diff_bounds(r, n).unwrap();
                assert!(
                    pair.lower < diff && diff < pair.upper,
                    "violated at r={r}, n={n}: {} < {diff} < {}",
                    pair.lower,
                    pair.upper
                );
            }
        }
    }

    #[test]
    fn beta_stable_form_matches_defining_form() {
        for r in [1u32, 3, 10, 100] {
            let rf = f64::from(r);
            let direct = (-rf + (rf * rf + 1.0).sqrt()) / 2.0;
            let pair = harmonic_diff_bounds(r, u64::from(r) + 1).unwrap();
            assert!((pair.beta - direct).abs() <= 1e-12 * pair.beta);
        }
    }

    #[test]
    fn bound_width_shrinks_with_r() {
        let wide = harmonic_diff_bounds(3, 9).unwrap();
        let narrow = harmonic_diff_bounds(30, 90).unwrap();
        assert!(wide.upper - wide.lower > narrow.upper - narrow.lower);
        let diff = harmonic(8) - harmonic(2);
        assert!(wide.lower < diff && diff < wide.upper);
    }

    #[test]
    fn topsoe_worked_values() {
        assert!(topsoe_check(2.0).unwrap());
        assert!(topsoe_check(0.5).unwrap());
        assert!(topsoe_check(1e-3).unwrap());
        assert!(topsoe_check(1e3).unwrap());
        assert!(topsoe_check(1.0).is_err());
        assert!(topsoe_check(0.0).is_err());
        assert!(topsoe_check(-2.0).is_err());
        assert!(topsoe_check(f64::INFINITY).is_err());
    }

    #[test]
    fn topsoe_symmetric_under_reciprocal() {
        // 1/x + x - 2 is invariant under x <-> 1/x and so is log^2 x.
        for &x in &[2.0, 3.5, 10.0, 250.0] {
            assert_eq!(topsoe_check(x).unwrap(), topsoe_check(1.0 / x).unwrap());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(harmonic_diff_bounds(0, 5).is_err());
        assert!(harmonic_diff_bounds(3, 3).is_err());
        assert!(harmonic_diff_bounds(3, 2).is_err());
    }
}
