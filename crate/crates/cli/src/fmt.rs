//! Locale-independent rendering of reals at a fixed 10 significant digits.
//!
//! Output is positional for decimal exponents in `[-4, 9]` and scientific
//! (`d.dddddddddeE`) outside, with no trailing-zero trimming, so re-running
//! a command reproduces its output byte for byte.

/// Formats `x` with exactly 10 significant digits, dot decimal separator.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0.000000000".to_string();
    }

    let sci = format!("{:.9e}", x); // e.g. "-1.234567890e-2"
    let (mantissa, exp) = sci.split_once('e').expect("{:.9e} always contains 'e'");
    let exp: i32 = exp.parse().expect("{:.9e} exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    debug_assert_eq!(digits.len(), 10);

    if !(-4..=9).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    if exp >= 0 {
        let split = (exp + 1) as usize;
        let int_part = &digits[..split];
        let frac_part = &digits[split..];
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn representative_values() {
        assert_eq!(fmt_f64(0.0), "0.000000000");
        assert_eq!(fmt_f64(-0.0), "0.000000000");
        assert_eq!(fmt_f64(1.0), "1.000000000");
        assert_eq!(fmt_f64(104.0), "104.0000000");
        assert_eq!(fmt_f64(0.04), "0.04000000000");
        assert_eq!(fmt_f64(-0.5), "-0.5000000000");
        assert_eq!(fmt_f64(2.0 / 3.0), "0.6666666667");
        assert_eq!(fmt_f64(1234567890.0), "1234567890");
        assert_eq!(fmt_f64(1e12), "1.000000000e12");
        assert_eq!(fmt_f64(1.5e-5), "1.500000000e-5");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn round_trips_to_10_significant_digits() {
        for &x in &[0.038811207, 108.0, 0.9537037037, 3.25e-7, 9.0e14] {
            let parsed: f64 = fmt_f64(x).parse().unwrap();
            assert!(
                (parsed - x).abs() <= 1e-9 * x.abs(),
                "{x} -> {}",
                fmt_f64(x)
            );
        }
    }
}
