//! Exact-rational oracle for the log-probability estimator.
//!
//! The general construction of an unbiased IBS estimator of `f(q)`,
//! `q = 1 - p`, evaluates `(r-1)! c_{r,k} / (n-1)!` at `k = n - r`, where
//! `c_{r,k}` are the Taylor coefficients of `f(q) / (1-q)^r` at `q = 0`.
//! For `f(q) = log(1-q)` the coefficients satisfy `c_{r,0} = 0` and
//!
//! `c_{r,k} = -r^(k-1) + (r+k-1) c_{r,k-1}`
//!
//! with `r^(k)` the rising factorial. Carried out in arbitrary-precision
//! rational arithmetic, this gives an independent exact route to the
//! harmonic-number form `-H_{n-1} + H_{r-1}` computed by the sampler; the
//! two are compared term by term in the verification suite. Factorials here
//! overflow 64-bit integers well inside the checked range, so exact big
//! integers are mandatory and no floating point is used.

use super::{check_r, AnalysisError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Evaluates the unbiased log-probability estimator at `(r, n)` as an exact
/// reduced rational, via the coefficient recurrence. Requires `r >= 2` and
/// `n >= r`.
pub fn degroot_oracle(r: u32, n: u64) -> Result<BigRational, AnalysisError> {
    check_r(r, 2, "degroot_oracle")?;
    let r64 = u64::from(r);
    if n < r64 {
        return Err(AnalysisError::Domain(format!(
            "degroot_oracle requires n >= r; got n = {n}, r = {r}"
        )));
    }

    let k_max = n - r64;
    let mut c = BigInt::zero();
    let mut rising = BigInt::one(); // r^(k-1), starting at r^(0) = 1 for k = 1
    for k in 1..=k_max {
        let factor = BigInt::from(r64 + k - 1);
        c = -&rising + &factor * &c;
        rising *= factor;
    }

    // (r-1)! c / (n-1)! = c / (r (r+1) ... (n-1))
    let mut denom = BigInt::one();
    for j in r64..n {
        denom *= BigInt::from(j);
    }
    Ok(BigRational::new(c, denom))
}

/// The exact rational `-H_{n-1} + H_{r-1} = -(1/r + ... + 1/(n-1))`,
/// the closed form the oracle must reproduce. Requires `n >= r >= 1`.
pub fn harmonic_diff_rational(r: u32, n: u64) -> Result<BigRational, AnalysisError> {
    check_r(r, 1, "harmonic_diff_rational")?;
    let r64 = u64::from(r);
    if n < r64 {
        return Err(AnalysisError::Domain(format!(
            "harmonic_diff_rational requires n >= r; got n = {n}, r = {r}"
        )));
    }
    let mut acc = BigRational::zero();
    for k in r64..n {
        acc += BigRational::new(BigInt::one(), BigInt::from(k));
    }
    Ok(-acc)
}
