//! Gauss hypergeometric series.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

fn nonpositive_integer(a: f64) -> Option<u64> {
    if a <= 0.0 && a == libm::floor(a) && a > -1e15 {
        Some((-a) as u64)
    } else {
        None
    }
}

/// `₂F₁(a, b; c; w)` by its ascending series.
///
/// Terminating cases (`a` or `b` a nonpositive integer) are summed in full
/// for any `w`. Otherwise `|w| < 1` is required and the series is cut when
/// the geometric bound on the remaining terms, built from the current term
/// ratio, drops below `1e-16` relative to the partial sum.
pub fn hyp2f1(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && w.is_finite()) {
        return Err(Error::InvalidInput("hyp2f1 arguments must be finite"));
    }
    let terminate = match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    };
    let domain = Error::Domain {
        op: "hyp2f1",
        re: w,
        im: 0.0,
    };
    if let Some(cn) = nonpositive_integer(c) {
        // A pole of the coefficients is harmless only if the series stops
        // before reaching it.
        if terminate.is_none_or(|t| t > cn) {
            return Err(domain);
        }
    }
    match terminate {
        Some(n) => {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 0..n {
                let kf = k as f64;
                term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
                sum += term;
            }
            Ok(sum)
        }
        None => {
            if w.abs() >= 1.0 {
                return Err(domain);
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 0..MAX_TERMS {
                let kf = k as f64;
                let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
                term *= ratio;
                sum += term;
                let next = ((a + kf + 1.0) * (b + kf + 1.0) / ((c + kf + 1.0) * (kf + 2.0)) * w).abs();
                if next < 1.0 {
                    let tail = term.abs() * next / (1.0 - next);
                    if tail <= 1e-16 * sum.abs().max(f64::MIN_POSITIVE) {
                        return Ok(sum);
                    }
                }
                if term == 0.0 {
                    return Ok(sum);
                }
            }
            Err(Error::Domain {
                op: "hyp2f1 (series did not converge)",
                re: w,
                im: 0.0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_terminating() {
        assert_eq!(hyp2f1(0.0, 2.0, 3.0, 0.7).unwrap(), 1.0);
        for &w in &[0.3, 2.0, -5.0] {
            let v = hyp2f1(-1.0, 1.5, 3.0, w).unwrap();
            assert!((v - (1.0 - w / 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_half_one_two() {
        for &w in &[0.75, 0.1, -0.9, 0.99] {
            let v = hyp2f1(0.5, 1.0, 2.0, w).unwrap();
            let exact = 2.0 * (1.0 - libm::sqrt(1.0 - w)) / w;
            assert!((v - exact).abs() < 1e-12, "{w}: {v} {exact}");
        }
        assert!((hyp2f1(0.5, 1.0, 2.0, 0.75).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_terminating_outside_disc_is_rejected() {
        assert!(matches!(hyp2f1(0.5, 1.0, 2.0, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn log_identity() {
        // w ₂F₁(1, 1; 2; w) = −log(1 − w)
        let w = 0.6;
        let v = w * hyp2f1(1.0, 1.0, 2.0, w).unwrap();
        assert!((v + libm::log(1.0 - w)).abs() < 1e-13);
    }
}
