//! The moment hierarchy of the free Jacobi process.
//!
//! With `m_n(t) = Φ̃(J_tⁿ)`,
//!
//! ```text
//! dm_n/dt = −n m_n + nθ m_{n−1} + λθ n Σ_{k=0}^{n−2} m_{n−k−1}(m_k − m_{k+1}).
//! ```
//!
//! The system is lower triangular: `dm_n/dt` involves only `m₀ … m_n`, so a
//! truncated vector evolves exactly and truncation only matters for series
//! functionals such as `Φ̃(log(P − J))`.
//!
//! Routines that integrate or combine moments are generic over
//! [`Scalar`], so the same code runs in `f64` or in
//! [`DoubleDouble`](crate::dd::DoubleDouble).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dd::Scalar;
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{moments_of_measure, SpectralMeasure};
use crate::params::JacobiParams;
use crate::stationary;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// Slack for the monotonicity and Hankel checks along trajectories.
pub const INVARIANT_TOL: f64 = 1e-9;

/// Initial spectral data for `J₀`.
#[derive(Clone, Debug)]
pub enum Start {
    /// `J₀ = cP` with `c ∈ (0, 1)`, so `m_n = cⁿ`.
    Scalar(f64),
    /// The stationary law.
    Stationary,
    /// A law supported in `(ε, 1 − ε)` with `ε = 1e-6`.
    Measure(SpectralMeasure),
}

/// Margin keeping a measure start strictly inside `(0, P)`.
pub const START_MARGIN: f64 = 1e-6;

/// Moment vector `m₀ … m_N` of a start.
pub fn initial_moments(p: &JacobiParams, start: &Start, order: usize) -> Result<Vec<f64>> {
    match start {
        Start::Scalar(c) => {
            if !(c.is_finite() && *c > 0.0 && *c < 1.0) {
                return Err(Error::InvalidInput("scalar start c must lie in (0, 1)"));
            }
            let mut m = vec![1.0; order + 1];
            for n in 1..=order {
                m[n] = m[n - 1] * c;
            }
            Ok(m)
        }
        Start::Stationary => Ok(stationary::stationary_moments(p, order)?
            .into_iter()
            .map(|s| s.value)
            .collect()),
        Start::Measure(mu) => {
            let (lo, hi) = mu.support();
            if mu.atom0() > 0.0 || mu.atom1() > 0.0 || lo < START_MARGIN || hi > 1.0 - START_MARGIN {
                return Err(Error::InvalidInput(
                    "measure start must be supported in (1e-6, 1 - 1e-6) without atoms",
                ));
            }
            let mut m = moments_of_measure(mu, order);
            m[0] = 1.0;
            Ok(m)
        }
    }
}

/// Truncated moments at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentState<S = f64> {
    pub t: f64,
    pub m: Vec<S>,
    pub params: JacobiParams,
}

impl<S: Scalar> MomentState<S> {
    pub fn new(params: JacobiParams, t: f64, m: Vec<S>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidInput("moment vector must contain m0"));
        }
        Ok(Self { t, m, params })
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.m.len() - 1
    }

    /// Moments as `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        self.m.iter().map(|v| v.to_f64()).collect()
    }

    /// `ρ^{N+1}/(1 − ρ)`, the bound on `Σ_{n>N} m_n` when `m_n ≤ ρⁿ`.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        if !(0.0..1.0).contains(&rho) {
            return f64::INFINITY;
        }
        libm::pow(rho, self.order() as f64 + 1.0) / (1.0 - rho)
    }

    /// Checks `m₀ = 1`, `0 ≤ m_{n+1} ≤ m_n ≤ 1` and Hankel positivity, all
    /// within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = self.to_f64();
        check_moment_vector(&m, self.t, tol)
    }
}

fn check_moment_vector(m: &[f64], t: f64, tol: f64) -> Result<()> {
    let fail = |index, what| Err(Error::Integration { t, index, what });
    if (m[0] - 1.0).abs() > tol {
        return fail(0, "m0 differs from 1");
    }
    for (n, &v) in m.iter().enumerate() {
        if !v.is_finite() {
            return fail(n, "non-finite moment");
        }
        if v < -tol || v > 1.0 + tol {
            return fail(n, "moment outside [0, 1]");
        }
        if n > 0 && v > m[n - 1] + tol {
            return fail(n, "moment sequence increases");
        }
    }
    if m.len() >= 5 && !linalg::hankel_positive(&m[..5], tol) {
        return fail(4, "Hankel matrix not positive semidefinite");
    }
    Ok(())
}

/// Right-hand side of the hierarchy for `m₀ … m_N`.
pub fn moment_rhs<S: Scalar>(params: &JacobiParams, m: &[S]) -> Vec<S> {
    let n_max = m.len().saturating_sub(1);
    let theta = S::from_f64(params.theta());
    let alpha = S::from_f64(params.alpha());
    let mut d = vec![S::zero(); m.len()];
    // diff[k] = m_k − m_{k+1}
    let diff: Vec<S> = m.windows(2).map(|w| w[0] - w[1]).collect();
    for n in 1..=n_max {
        let nf = S::from_f64(n as f64);
        let mut conv = S::zero();
        for k in 0..n.saturating_sub(1) {
            conv += m[n - k - 1] * diff[k];
        }
        d[n] = nf * (theta * m[n - 1] - m[n] + alpha * conv);
    }
    d
}

/// [`moment_rhs`] for a state.
pub fn moment_rhs_state<S: Scalar>(s: &MomentState<S>) -> Vec<S> {
    moment_rhs(&s.params, &s.m)
}

fn rk4_step<S: Scalar>(params: &JacobiParams, m: &[S], h: S) -> Vec<S> {
    let half = S::from_f64(0.5) * h;
    let sixth = h / S::from_f64(6.0);
    let two = S::from_f64(2.0);
    let axpy = |x: &[S], a: S, y: &[S]| -> Vec<S> { x.iter().zip(y).map(|(&xi, &yi)| xi + a * yi).collect() };
    let k1 = moment_rhs(params, m);
    let k2 = moment_rhs(params, &axpy(m, half, &k1));
    let k3 = moment_rhs(params, &axpy(m, half, &k2));
    let k4 = moment_rhs(params, &axpy(m, h, &k3));
    (0..m.len())
        .map(|i| m[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect()
}

/// Classical RK4 from `m0` over `[0, T]` with step `h`, keeping every
/// `every`-th state (and always the first and last).
///
/// `T/h` must be an integer up to `1e-9` relative slack. Each step is
/// checked for the moment invariants; a violation reports its time and
/// index.
pub fn integrate_moments_every<S: Scalar>(
    params: &JacobiParams,
    m0: Vec<S>,
    t_end: f64,
    h: f64,
    every: usize,
) -> Result<Vec<MomentState<S>>> {
    if !(h > 0.0 && h.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput("need h > 0 and T >= 0"));
    }
    if m0.len() < 2 {
        return Err(Error::InvalidInput("truncation order must be at least 1"));
    }
    let every = every.max(1);
    let steps_f = libm::round(t_end / h);
    if (steps_f * h - t_end).abs() > 1e-9 * t_end.max(h) {
        return Err(Error::InvalidInput("T must be an integer multiple of h"));
    }
    let steps = steps_f as usize;
    let first = MomentState::new(*params, 0.0, m0)?;
    first.validate(INVARIANT_TOL)?;
    let mut out = Vec::with_capacity(steps / every + 2);
    let mut m = first.m.clone();
    out.push(first);
    let hs = S::from_f64(h);
    for i in 1..=steps {
        m = rk4_step(params, &m, hs);
        let t = i as f64 * h;
        let mf: Vec<f64> = m.iter().map(|v| v.to_f64()).collect();
        check_moment_vector(&mf, t, INVARIANT_TOL)?;
        if i % every == 0 || i == steps {
            out.push(MomentState::new(*params, t, m.clone())?);
        }
    }
    Ok(out)
}

/// [`integrate_moments_every`] keeping every step.
pub fn integrate_moments<S: Scalar>(
    params: &JacobiParams,
    m0: Vec<S>,
    t_end: f64,
    h: f64,
) -> Result<Vec<MomentState<S>>> {
    integrate_moments_every(params, m0, t_end, h, 1)
}

/// `m₁(t) = (m₁(0) − θ)e^{−t} + θ`.
pub fn m1_exact(params: &JacobiParams, m1_0: f64, t: f64) -> f64 {
    (m1_0 - params.theta()) * libm::exp(-t) + params.theta()
}

/// Least-squares slope of `log|m₁(t) − θ|` against `t`, using samples
/// whose distance to `θ` exceeds `floor`.
pub fn fit_relaxation_rate(times: &[f64], m1: &[f64], theta: f64, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(m1)
        .filter(|(_, &v)| (v - theta).abs() > floor)
        .map(|(&t, &v)| (t, libm::log((v - theta).abs())))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn checked_binomials(j: usize) -> Result<Vec<i128>> {
    let mut row = Vec::with_capacity(j + 1);
    let mut c: i128 = 1;
    for i in 0..=j {
        row.push(c);
        if i < j {
            c = c
                .checked_mul((j - i) as i128)
                .ok_or(Error::Overflow("binomial coefficient"))?
                / (i as i128 + 1);
        }
    }
    Ok(row)
}

/// Integer coefficients `c_{k,i}` with
/// `Φ̃(T_k(2J − P)) = Σ_i c_{k,i} m_i`.
///
/// The power coefficients of `T_k` come from `T_{k+1} = 2xT_k − T_{k−1}`,
/// and each `(2x − 1)^j` is expanded binomially. Everything is checked
/// 128-bit integer arithmetic.
pub fn chebyshev_moment_coefficients(k: usize) -> Result<Vec<i128>> {
    let overflow = || Error::Overflow("Chebyshev coefficients");
    // Power-basis coefficients of T_0 … T_k.
    let mut prev = vec![1i128];
    let mut cur = vec![0i128, 1];
    let tau = if k == 0 {
        prev
    } else {
        for _ in 1..k {
            let mut next = vec![0i128; cur.len() + 1];
            for (i, &c) in cur.iter().enumerate() {
                next[i + 1] = c.checked_mul(2).ok_or_else(overflow)?;
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i] = next[i].checked_sub(c).ok_or_else(overflow)?;
            }
            prev = cur;
            cur = next;
        }
        cur
    };
    let mut out = vec![0i128; k + 1];
    for (j, &t) in tau.iter().enumerate() {
        if t == 0 {
            continue;
        }
        let binom = checked_binomials(j)?;
        for (i, &b) in binom.iter().enumerate() {
            let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
            let pow2 = 1i128.checked_shl(i as u32).ok_or_else(overflow)?;
            let term = t
                .checked_mul(b)
                .and_then(|v| v.checked_mul(pow2))
                .and_then(|v| v.checked_mul(sign))
                .ok_or_else(overflow)?;
            out[i] = out[i].checked_add(term).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// `c_k = Φ̃(T_k(2J − P))` from the moment vector.
pub fn chebyshev_functional<S: Scalar>(m: &[S], k: usize) -> Result<S> {
    if k + 1 > m.len() {
        return Err(Error::Truncation {
            requested: k,
            available: m.len().saturating_sub(1),
        });
    }
    let coef = chebyshev_moment_coefficients(k)?;
    let mut s = S::zero();
    for (c, &mi) in coef.iter().zip(m) {
        s += S::from_i128(*c) * mi;
    }
    Ok(s)
}

/// Time derivative of `c_k` at `λ = 1, θ = 1/2`, written in the
/// coefficients themselves: `ċ_k = −k c_k − k Σ_{j=1}^{k−1} c_j c_{k−j}`.
///
/// This is an algebraic rewriting of [`moment_rhs`] at those parameters.
/// The quadratic sum is why `e^{kt} c_k` is conserved for `k ≤ 1` but not
/// in general for `k ≥ 2`.
pub fn chebyshev_drift(c: &[f64], k: usize) -> Result<f64> {
    if k + 1 > c.len() {
        return Err(Error::Truncation {
            requested: k,
            available: c.len().saturating_sub(1),
        });
    }
    let conv: f64 = (1..k).map(|j| c[j] * c[k - j]).sum();
    Ok(-(k as f64) * (c[k] + conv))
}

/// How the tail `Σ_{n>N}` of a moment series is controlled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailPolicy {
    /// A known bound `m_n ≤ ρⁿ` with `ρ < 1`. The partial sum is returned
    /// and the tail bound must not exceed the tolerance.
    Certified { rho: f64 },
    /// Geometric extrapolation with the observed ratio `m_N/m_{N−1}`. The
    /// extrapolated tail is added; its uncertainty is taken as the change
    /// in the extrapolation when the ratio `m_{N−1}/m_{N−2}` is used
    /// instead, and must not exceed the tolerance.
    Empirical,
}

/// A summed series with its tail control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Certified bound or empirical uncertainty of the tail.
    pub tail: f64,
    /// `ρ` for certified tails, the fitted ratio for empirical ones.
    pub ratio: f64,
}

#[derive(Clone, Copy)]
enum Series {
    Resolvent,
    Log,
}

/// `Σ_{j≥1} m ρ^j w_j` where `w_j = 1` (resolvent) or `1/(N + j)` (log).
fn geometric_tail(kind: Series, m_last: f64, rho: f64, order: usize) -> f64 {
    match kind {
        Series::Resolvent => m_last * rho / (1.0 - rho),
        Series::Log => {
            let mut s = 0.0;
            let mut pw = m_last;
            for j in 1..1_000_000usize {
                pw *= rho;
                let term = pw / (order + j) as f64;
                s += term;
                if term <= 1e-18 * s {
                    break;
                }
            }
            s
        }
    }
}

fn certified_tail(kind: Series, rho: f64, order: usize) -> f64 {
    let n1 = order as f64 + 1.0;
    let base = libm::pow(rho, n1) / (1.0 - rho);
    match kind {
        Series::Resolvent => base,
        Series::Log => base / n1,
    }
}

fn summed(kind: Series, m: &[f64], policy: TailPolicy, tol: f64) -> Result<SeriesValue> {
    let order = m.len() - 1;
    let partial: f64 = match kind {
        Series::Resolvent => m.iter().sum(),
        Series::Log => -m.iter().enumerate().skip(1).map(|(n, v)| v / n as f64).sum::<f64>(),
    };
    let sign = match kind {
        Series::Resolvent => 1.0,
        Series::Log => -1.0,
    };
    match policy {
        TailPolicy::Certified { rho } => {
            if !(rho >= 0.0 && rho < 1.0) {
                return Err(Error::TailNotCertified {
                    tail: f64::INFINITY,
                    tolerance: tol,
                    required_order: None,
                });
            }
            let tail = certified_tail(kind, rho, order);
            if tail > tol {
                let mut n = order;
                while certified_tail(kind, rho, n) > tol && n < 1 << 24 {
                    n += 1;
                }
                return Err(Error::TailNotCertified {
                    tail,
                    tolerance: tol,
                    required_order: Some(n),
                });
            }
            Ok(SeriesValue {
                value: partial,
                tail,
                ratio: rho,
            })
        }
        TailPolicy::Empirical => {
            if order < 3 {
                return Err(Error::Truncation {
                    requested: 3,
                    available: order,
                });
            }
            let (a, b, c) = (m[order], m[order - 1], m[order - 2]);
            if a == 0.0 {
                return Ok(SeriesValue {
                    value: partial,
                    tail: 0.0,
                    ratio: 0.0,
                });
            }
            if !(a > 0.0 && b > 0.0 && c > 0.0) {
                return Err(Error::TailNotCertified {
                    tail: f64::INFINITY,
                    tolerance: tol,
                    required_order: None,
                });
            }
            let rho = a / b;
            let rho_prev = b / c;
            if !(rho < 1.0 && rho_prev < 1.0) {
                return Err(Error::TailNotCertified {
                    tail: f64::INFINITY,
                    tolerance: tol,
                    required_order: None,
                });
            }
            let tail = geometric_tail(kind, a, rho, order);
            let alt = geometric_tail(kind, a, rho_prev, order);
            let uncertainty = (tail - alt).abs();
            if uncertainty > tol {
                let extra = libm::ceil(libm::log(tol / uncertainty) / libm::log(rho)).max(1.0);
                return Err(Error::TailNotCertified {
                    tail: uncertainty,
                    tolerance: tol,
                    required_order: Some(order + extra as usize),
                });
            }
            Ok(SeriesValue {
                value: partial + sign * tail,
                tail: uncertainty,
                ratio: rho,
            })
        }
    }
}

/// `Φ̃((P − J)⁻¹) = Σ_{n≥0} m_n`.
pub fn resolvent_functional(m: &[f64], policy: TailPolicy, tol: f64) -> Result<SeriesValue> {
    summed(Series::Resolvent, m, policy, tol)
}

/// `Φ̃(log(P − J)) = −Σ_{n≥1} m_n/n`.
pub fn log_functional(m: &[f64], policy: TailPolicy, tol: f64) -> Result<SeriesValue> {
    summed(Series::Log, m, policy, tol)
}

/// One sample of [`log_identity_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogIdentitySample {
    pub t: f64,
    pub log_functional: f64,
    pub resolvent: f64,
    pub residual: f64,
}

/// Residual of
///
/// ```text
/// Φ̃(log(P−J_t)) − Φ̃(log(P−J₀)) + (1 − λθ)t − (1 − θ − λθ)∫₀ᵗ Φ̃((P−J_s)⁻¹) ds
/// ```
///
/// along a trajectory, with the time integral by the trapezoid rule. The
/// identity holds exactly in the continuum, so the residual measures
/// truncation and discretization error.
pub fn log_identity_residual(
    trajectory: &[MomentState<f64>],
    policy: TailPolicy,
    tol: f64,
) -> Result<Vec<LogIdentitySample>> {
    let first = trajectory
        .first()
        .ok_or(Error::InvalidInput("empty trajectory"))?;
    let p = first.params;
    let slope = 1.0 - p.alpha();
    let weight = 1.0 - p.theta() - p.alpha();
    let mut out = Vec::with_capacity(trajectory.len());
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut l0 = 0.0;
    for s in trajectory {
        let l = log_functional(&s.m, policy, tol)?.value;
        let r = resolvent_functional(&s.m, policy, tol)?.value;
        match prev {
            None => l0 = l,
            Some((t0, r0)) => integral += 0.5 * (s.t - t0) * (r0 + r),
        }
        prev = Some((s.t, r));
        out.push(LogIdentitySample {
            t: s.t,
            log_functional: l,
            resolvent: r,
            residual: l - l0 + slope * s.t - weight * integral,
        });
    }
    Ok(out)
}

/// Catalan numbers `D₀ … D_n` from `D_k = Σ_{j=1}^k D_{k−j} D_{j−1}`.
pub fn catalan_by_convolution(n: usize) -> Result<Vec<u128>> {
    let mut d = vec![1u128];
    for k in 1..=n {
        let mut s: u128 = 0;
        for j in 1..=k {
            let prod = d[k - j]
                .checked_mul(d[j - 1])
                .ok_or(Error::Overflow("Catalan convolution"))?;
            s = s.checked_add(prod).ok_or(Error::Overflow("Catalan convolution"))?;
        }
        d.push(s);
    }
    Ok(d)
}

/// `C(2k, k)/(k + 1)` computed directly.
pub fn catalan_closed_form(k: usize) -> Result<u128> {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        // C(2k, i+1) = C(2k, i)(2k − i)/(i + 1) stays integral.
        c = c
            .checked_mul(2 * k as u128 - i)
            .ok_or(Error::Overflow("central binomial"))?
            / (i + 1);
    }
    Ok(c / (k as u128 + 1))
}

/// Checks the Catalan convolution identity against the closed form for all
/// `k ≤ n` (exact integers, `n ≤ 30`) and the stationary recurrence
/// `(1−θ)m_j = θ Σ_{k<j} m_{j−k−1}(m_k − m_{k+1})` for arcsine moments at
/// `λ = 1, θ = 1/2` for all `j ≤ n` in exact rationals.
pub fn catalan_identity_check(n: usize) -> Result<bool> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidInput("n must lie in 1..=30"));
    }
    let conv = catalan_by_convolution(n)?;
    for (k, &d) in conv.iter().enumerate() {
        if d != catalan_closed_form(k)? {
            return Ok(false);
        }
    }
    Ok(arcsine_recurrence_check(n))
}

/// `C(2n, n)/4ⁿ`, the arcsine moments, exactly.
pub fn arcsine_moments_rational(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut m = BigRational::one();
    out.push(m.clone());
    for k in 1..=n {
        m = m * BigRational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k));
        out.push(m.clone());
    }
    out
}

/// The stationary recurrence at `λ = 1, θ = 1/2` holds exactly for
/// `j = 1 … n` with arcsine moments.
pub fn arcsine_recurrence_check(n: usize) -> bool {
    let m = arcsine_moments_rational(n + 1);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    (1..=n).all(|j| {
        let mut s = BigRational::zero();
        for k in 0..j {
            s += &m[j - k - 1] * (&m[k] - &m[k + 1]);
        }
        &half * &m[j] == &half * s
    })
}

/// Stationary moments in exact rational arithmetic, as the fixed point
/// `m_n = θ m_{n−1} + λθ Σ_{k=0}^{n−2} m_{n−k−1}(m_k − m_{k+1})` of the
/// hierarchy.
pub fn stationary_moments_rational(
    lambda: &BigRational,
    theta: &BigRational,
    n: usize,
) -> Vec<BigRational> {
    let alpha = lambda * theta;
    let mut m: Vec<BigRational> = vec![BigRational::one()];
    for j in 1..=n {
        let mut conv = BigRational::zero();
        for k in 0..j.saturating_sub(1) {
            conv += &m[j - k - 1] * (&m[k] - &m[k + 1]);
        }
        let next = theta * &m[j - 1] + &alpha * conv;
        m.push(next);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::DoubleDouble;

    fn p(l: f64, t: f64) -> JacobiParams {
        JacobiParams::new(l, t).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let q = p(0.7, 0.4);
        let ones = vec![1.0; 6];
        let d = moment_rhs(&q, &ones);
        for (n, v) in d.iter().enumerate() {
            assert!((v - n as f64 * (0.4 - 1.0)).abs() < 1e-15);
        }
        let mut e = vec![0.0; 6];
        e[0] = 1.0;
        let d = moment_rhs(&q, &e);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 0.4).abs() < 1e-15 && d[2].abs() < 1e-15);
    }

    #[test]
    fn chebyshev_low_orders() {
        assert_eq!(chebyshev_moment_coefficients(0).unwrap(), vec![1]);
        assert_eq!(chebyshev_moment_coefficients(1).unwrap(), vec![-1, 2]);
        assert_eq!(chebyshev_moment_coefficients(2).unwrap(), vec![1, -8, 8]);
        assert!(chebyshev_functional(&[1.0, 0.5], 2).is_err());
    }

    #[test]
    fn m1_closed_form() {
        let q = p(1.0, 0.5);
        assert_eq!(m1_exact(&q, 0.25, 0.0), 0.25);
        assert!((m1_exact(&q, 0.25, 1.0) - 0.408_030_139_707_139_4).abs() < 1e-12);
        assert!((m1_exact(&q, 0.25, 60.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn geometric_functionals() {
        let c: f64 = 0.3;
        let m: Vec<f64> = (0..60).map(|n| c.powi(n)).collect();
        let l = log_functional(&m, TailPolicy::Certified { rho: c }, 1e-12).unwrap();
        assert!((l.value - libm::log(1.0 - c)).abs() < 1e-12);
        let e = log_functional(&m, TailPolicy::Empirical, 1e-12).unwrap();
        assert!((e.value - libm::log(1.0 - c)).abs() < 1e-15);
        let zero = {
            let mut v = vec![0.0; 10];
            v[0] = 1.0;
            v
        };
        let r = resolvent_functional(&zero, TailPolicy::Certified { rho: 0.0 }, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(log_functional(&zero, TailPolicy::Empirical, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn certified_tail_refusal_names_the_required_order() {
        let m: Vec<f64> = (0..11).map(|n| 0.9f64.powi(n)).collect();
        match resolvent_functional(&m, TailPolicy::Certified { rho: 0.9 }, 1e-6) {
            Err(Error::TailNotCertified { required_order: Some(n), .. }) => {
                assert!(0.9f64.powi(n as i32 + 1) / 0.1 <= 1e-6);
                assert!(0.9f64.powi(n as i32) / 0.1 > 1e-6);
            }
            other => panic!("{other:?}"),
        }
        assert!(resolvent_functional(&m, TailPolicy::Certified { rho: 1.0 }, 1.0).is_err());
    }

    #[test]
    fn catalan_small_cases() {
        let d = catalan_by_convolution(5).unwrap();
        assert_eq!(d, vec![1, 1, 2, 5, 14, 42]);
        assert!(catalan_identity_check(4).unwrap());
        assert!(catalan_identity_check(30).unwrap());
    }

    #[test]
    fn rational_fixed_point_is_arcsine_at_one_half() {
        let one = BigRational::one();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(stationary_moments_rational(&one, &half, 10), arcsine_moments_rational(10));
    }

    #[test]
    fn double_double_trajectory_matches_f64() {
        let q = p(1.0, 0.5);
        let m0: Vec<f64> = (0..6).map(|n| 0.25f64.powi(n)).collect();
        let a = integrate_moments(&q, m0.clone(), 0.1, 1e-2).unwrap();
        let b = integrate_moments(&q, m0.into_iter().map(DoubleDouble::from).collect(), 0.1, 1e-2).unwrap();
        let x = a.last().unwrap().to_f64();
        let y = b.last().unwrap().to_f64();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_starts() {
        let q = p(0.5, 0.5);
        assert!(initial_moments(&q, &Start::Scalar(1.0), 4).is_err());
        assert!(initial_moments(&q, &Start::Scalar(0.0), 4).is_err());
        assert!(integrate_moments(&q, vec![1.0], 1.0, 0.1).is_err());
        assert!(integrate_moments(&q, vec![1.0, 0.5], 1.0, 0.3).is_err());
    }
}
