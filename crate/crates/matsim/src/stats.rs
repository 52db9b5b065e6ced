//! Empirical statistics compared with free limits.

use free_jacobi_core::moments::chebyshev_moment_coefficients;
use free_jacobi_core::stationary::{stationary_cdf, stationary_moments};
use free_jacobi_core::JacobiParams;
use serde::{Deserialize, Serialize};

use crate::config::MatrixJacobiConfig;
use crate::error::{MatsimError, Result};
use crate::simulate::{simulate, TrajectoryRecord};

/// Kolmogorov–Smirnov distance `sup |F_n − F|` between the empirical law of
/// `samples` and a distribution function evaluated by `cdf`.
pub fn ks_distance<F>(samples: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if samples.is_empty() {
        return Err(MatsimError::Diagnostic("no samples for a KS distance".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x)?;
        worst = worst.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(worst)
}

/// KS distance of eigenvalue samples to the stationary law of `params`.
pub fn stationary_ks(params: &JacobiParams, samples: &[f64]) -> Result<f64> {
    ks_distance(samples, |x| Ok(stationary_cdf(params, x)?))
}

/// Orders above this are refused by [`martingale_diagnostic`].
pub const MAX_MARTINGALE_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingalePoint {
    pub t: f64,
    pub k: usize,
    /// Trial mean of `tr_m T_k(2J_t − I)`.
    pub ck: f64,
    /// `e^{kt}` times `ck`.
    pub ck_scaled: f64,
    /// Standard error of `ck_scaled`.
    pub stderr_scaled: f64,
}

/// `e^{kt} ĉ_k(t)` along a record with `p = m`, `d = 2m`
/// (`λ = 1`, `θ = 1/2`).
///
/// Each trial's `ĉ_k` is the integer combination of its recorded moments
/// given by [`chebyshev_moment_coefficients`], so the standard error
/// accounts for correlation between moments.
pub fn martingale_diagnostic(record: &TrajectoryRecord, k: usize) -> Result<Vec<MartingalePoint>> {
    let cfg = &record.config;
    if k > MAX_MARTINGALE_ORDER {
        return Err(MatsimError::Diagnostic(format!(
            "order {k} exceeds {MAX_MARTINGALE_ORDER}; Monte Carlo noise dominates"
        )));
    }
    if cfg.p != cfg.m || cfg.d != 2 * cfg.m {
        return Err(MatsimError::Diagnostic("needs p = m and d = 2m (lambda = 1, theta = 1/2)".into()));
    }
    if k > cfg.moment_order {
        return Err(MatsimError::Diagnostic(format!(
            "order {k} needs moments up to {k}, record has {}",
            cfg.moment_order
        )));
    }
    let coef: Vec<f64> = chebyshev_moment_coefficients(k)?.iter().map(|&c| c as f64).collect();
    let n = record.trial_moments.len() as f64;
    let out = record
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let vals: Vec<f64> = record
                .trial_moments
                .iter()
                .map(|tm| coef.iter().zip(&tm[i]).map(|(c, m)| c * m).sum())
                .collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let scale = (k as f64 * t).exp();
            MartingalePoint {
                t,
                k,
                ck: mean,
                ck_scaled: scale * mean,
                stderr_scaled: scale * (var / n).sqrt(),
            }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub d: usize,
    pub m: usize,
    pub p: usize,
    /// KS distance of the pooled final spectrum to the free stationary law.
    pub ks: f64,
    pub m1_error: f64,
    pub m2_error: f64,
    pub m2_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `log ks` against `log d`.
    pub ks_order: f64,
    /// Whether the KS distance decreases strictly with `d`.
    pub monotone: bool,
}

/// Runs `base` at each ambient dimension in `dims`, scaling `m` and `p` in
/// proportion, and measures the distance of the final spectrum to the free
/// stationary law of `(m/p, p/d)`.
///
/// Meaningful for a Haar start, where the finite-`d` law is stationary and
/// only the dimension separates it from the limit.
pub fn convergence_study(base: &MatrixJacobiConfig, dims: &[usize], jobs: usize) -> Result<ConvergenceStudy> {
    if dims.len() < 2 {
        return Err(MatsimError::Diagnostic("a convergence study needs at least two dimensions".into()));
    }
    let params = JacobiParams::new(base.lambda(), base.theta())?;
    let free = stationary_moments(&params, 2)?;
    let mut points = Vec::with_capacity(dims.len());
    for &d in dims {
        if (d * base.m) % base.d != 0 || (d * base.p) % base.d != 0 {
            return Err(MatsimError::InvalidConfig(format!(
                "d = {d} does not keep m/d and p/d of the base configuration"
            )));
        }
        let mut cfg = base.clone();
        cfg.d = d;
        cfg.m = base.m * d / base.d;
        cfg.p = base.p * d / base.d;
        cfg.moment_order = cfg.moment_order.max(2);
        cfg.snapshot_times = vec![cfg.horizon];
        let rec = simulate(&cfg, jobs)?;
        let last = rec.times.len() - 1;
        points.push(ConvergencePoint {
            d,
            m: cfg.m,
            p: cfg.p,
            ks: stationary_ks(&params, &rec.snapshots[0].eigenvalues)?,
            m1_error: (rec.mean_moments[last][1] - free[1].value).abs(),
            m2_error: (rec.mean_moments[last][2] - free[2].value).abs(),
            m2_stderr: rec.stderr_moments[last][2],
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.d as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ks.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let monotone = points.windows(2).all(|w| w[1].ks < w[0].ks);
    Ok(ConvergenceStudy {
        points,
        ks_order: sxy / sxx,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_a_uniform_grid_against_the_uniform_law() {
        let n = 100;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&s, |x| Ok(x)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-15);
        assert!(ks_distance(&[], |x| Ok(x)).is_err());
    }
}
