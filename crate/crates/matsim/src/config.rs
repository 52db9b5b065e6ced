use serde::{Deserialize, Serialize};

use crate::error::{MatsimError, Result};

/// Initial state of a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixStart {
    /// `Y₀ = Z` Haar, so the corner starts (and stays) in the stationary law
    /// of dimension `d`.
    Haar,
    /// `Y₀ = I`, so `J₀ = P` and every moment starts at 1.
    IdentityCorner,
    /// A given `d × d` unitary, row-major `[re, im]` entries.
    Given { entries: Vec<[f64; 2]> },
}

/// Discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Geometric steps of unitary Brownian motion, then the `m × p` corner.
    UnitaryCorner,
    /// Euler–Maruyama on the `m × m` matrix Jacobi SDE in the free clock.
    DirectSde,
}

/// One Monte Carlo experiment.
///
/// With `m ≤ p ≤ d` the corner targets `λ = m/p`, `θ = p/d`, so
/// `λθ = m/d`. Time is the free clock throughout: a step `h` means
/// `E tr_d(ΔX²) = h` for the corner scheme and drift `(θI − J)h` with
/// Brownian entries of variance `h/d` for the direct SDE.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJacobiConfig {
    pub m: usize,
    pub p: usize,
    pub d: usize,
    pub step: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
    pub start: MatrixStart,
    pub scheme: Scheme,
    /// Moments are recorded every this many steps, and at the horizon.
    pub record_every: usize,
    /// Largest moment order recorded.
    pub moment_order: usize,
    /// Times at which pooled eigenvalues are kept.
    pub snapshot_times: Vec<f64>,
}

impl MatrixJacobiConfig {
    /// A Haar-start corner run with unit recording stride, 4 moments and
    /// no snapshots.
    pub fn new(m: usize, p: usize, d: usize, step: f64, horizon: f64, trials: usize, seed: u64) -> Self {
        Self {
            m,
            p,
            d,
            step,
            horizon,
            trials,
            seed,
            start: MatrixStart::Haar,
            scheme: Scheme::UnitaryCorner,
            record_every: 1,
            moment_order: 4,
            snapshot_times: Vec::new(),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.m as f64 / self.p as f64
    }

    pub fn theta(&self) -> f64 {
        self.p as f64 / self.d as f64
    }

    /// `m/p` in lowest terms.
    pub fn lambda_ratio(&self) -> (usize, usize) {
        reduce(self.m, self.p)
    }

    /// `p/d` in lowest terms.
    pub fn theta_ratio(&self) -> (usize, usize) {
        reduce(self.p, self.d)
    }

    /// Number of time steps.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MatsimError::InvalidConfig(msg));
        if !(1 <= self.m && self.m <= self.p && self.p <= self.d) {
            return bad(format!("need 1 <= m <= p <= d, got m={}, p={}, d={}", self.m, self.p, self.d));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive".into());
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad("horizon must be nonnegative".into());
        }
        let steps = (self.horizon / self.step).round();
        if (steps * self.step - self.horizon).abs() > 1e-9 * self.horizon.max(self.step) {
            return bad("horizon must be an integer multiple of the step".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if self.moment_order == 0 {
            return bad("moment_order must be at least 1".into());
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(t >= 0.0 && t <= self.horizon + 0.5 * self.step))
        {
            return bad("snapshot times must lie in [0, horizon]".into());
        }
        if let MatrixStart::Given { entries } = &self.start {
            if entries.len() != self.d * self.d {
                return bad(format!("given start needs {} entries", self.d * self.d));
            }
        }
        if self.scheme == Scheme::DirectSde && self.p == self.d {
            return bad("direct SDE needs p < d so that 0 < theta < 1".into());
        }
        Ok(())
    }
}

fn reduce(a: usize, b: usize) -> (usize, usize) {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    let g = x.max(1);
    (a / g, b / g)
}
