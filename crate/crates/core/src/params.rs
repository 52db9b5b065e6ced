//! Parameters of the free Jacobi process `FJP(λ, θ)`.

use crate::error::{Error, Result};

/// Slack used when classifying boundary cases such as `θ(λ + 1) = 1`.
const REGIME_SLACK: f64 = 1e-14;

/// The pair `(λ, θ)` with its derived constants.
///
/// `θ` is the trace of the projection `Q` and `λθ` the trace of `P`, so the
/// compressed process lives in `P𝒜P`. Construction enforces `λ > 0`,
/// `θ ∈ (0, 1)` and `λθ ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    lambda: f64,
    theta: f64,
}

impl JacobiParams {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        let bad = |reason| Error::InvalidParameters {
            lambda,
            theta,
            reason,
        };
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(bad("lambda must be a positive finite number"));
        }
        if !(theta.is_finite() && theta > 0.0 && theta < 1.0) {
            return Err(bad("theta must lie in (0, 1)"));
        }
        if lambda * theta > 1.0 + REGIME_SLACK {
            return Err(bad("lambda * theta must not exceed 1"));
        }
        Ok(Self { lambda, theta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `α = λθ`, the trace of `P`.
    pub fn alpha(&self) -> f64 {
        self.lambda * self.theta
    }

    /// `r = 1/(λθ)`, the free convolution power of the compression.
    pub fn r(&self) -> f64 {
        1.0 / self.alpha()
    }

    /// `l = 1/λ`.
    pub fn l(&self) -> f64 {
        1.0 / self.lambda
    }

    /// `k = (1 − θ)/(λθ)`.
    pub fn k(&self) -> f64 {
        (1.0 - self.theta) / self.alpha()
    }

    /// Leading coefficient `A = r²` of the edge polynomial `Ax² − Bx + C`.
    pub fn a_coef(&self) -> f64 {
        let r = self.r();
        r * r
    }

    /// `B = 2(r + (r − 2)/λ)`.
    pub fn b_coef(&self) -> f64 {
        let r = self.r();
        2.0 * (r + (r - 2.0) / self.lambda)
    }

    /// `C = (1 − 1/λ)²`.
    pub fn c_coef(&self) -> f64 {
        let c = 1.0 - 1.0 / self.lambda;
        c * c
    }

    /// Support edges `x± = (√(θ(1−λθ)) ± √(λθ(1−θ)))²`.
    pub fn support_edges(&self) -> (f64, f64) {
        let u = libm::sqrt(self.theta * (1.0 - self.alpha()).max(0.0));
        let v = libm::sqrt(self.alpha() * (1.0 - self.theta));
        let minus = (u - v) * (u - v);
        let plus = ((u + v) * (u + v)).min(1.0);
        (minus, plus)
    }

    /// `λ ≤ 1` and `1/θ ≥ λ + 1`: no atoms and the matrix SDE is defined.
    pub fn sde_valid(&self) -> bool {
        self.lambda <= 1.0 + REGIME_SLACK && self.theta * (self.lambda + 1.0) <= 1.0 + REGIME_SLACK
    }

    /// `λ < 1` and `1/θ > λ + 1`: support strictly inside `(0, 1)`.
    pub fn strict_interior(&self) -> bool {
        self.lambda < 1.0 - REGIME_SLACK
            && self.theta * (self.lambda + 1.0) < 1.0 - REGIME_SLACK
    }

    /// `λ = 1` up to the regime slack, so that `x₋ = 0`.
    pub(crate) fn lower_edge_at_zero(&self) -> bool {
        (self.lambda - 1.0).abs() <= REGIME_SLACK
    }

    /// `θ(λ + 1) = 1` up to the regime slack, so that `x₊ = 1`.
    pub(crate) fn upper_edge_at_one(&self) -> bool {
        (self.theta * (self.lambda + 1.0) - 1.0).abs() <= REGIME_SLACK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_pairs() {
        assert!(JacobiParams::new(0.0, 0.5).is_err());
        assert!(JacobiParams::new(1.0, 1.0).is_err());
        assert!(JacobiParams::new(3.0, 0.5).is_err());
        assert!(JacobiParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn arcsine_case_has_full_support() {
        let p = JacobiParams::new(1.0, 0.5).unwrap();
        let (lo, hi) = p.support_edges();
        assert_eq!(lo, 0.0);
        assert!((hi - 1.0).abs() < 1e-15);
        assert!(p.sde_valid());
        assert!(!p.strict_interior());
    }

    #[test]
    fn regime_flags() {
        let p = JacobiParams::new(1.0, 0.9).unwrap();
        assert!(!p.sde_valid());
        let q = JacobiParams::new(0.5, 0.5).unwrap();
        assert!(q.sde_valid() && q.strict_interior());
    }
}
