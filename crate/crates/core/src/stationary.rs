//! The stationary law of `FJP(λ, θ)`.
//!
//! The law is the compression of the two-point law `(1−θ)δ₀ + θδ₁` by a
//! free projection of trace `λθ`, i.e. the free convolution power
//! `μ = ⊞^r μ_{αa}` with `r = 1/(λθ)`. It has atoms
//! `a₀ = max(0, 1 − 1/λ)` at 0 and `a₁ = max(0, 1 − (1−θ)/(λθ))` at 1, and
//! density
//!
//! ```text
//! g(x) = √((x − x₋)(x₊ − x)) / (2πλθ x(1 − x))   on (x₋, x₊).
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::SpectralMeasure;
use crate::params::JacobiParams;
use crate::quad::{Abscissa, EdgeRule};

/// Condition number above which the ₂F₁ moment ladder is abandoned.
const LADDER_CONDITION_LIMIT: f64 = 1e6;

/// Support edges `(x₋, x₊)`. Boundary cases are snapped so that `x₋ = 0`
/// exactly when `λ = 1` and `x₊ = 1` exactly when `θ(λ + 1) = 1`.
pub fn support_edges(p: &JacobiParams) -> (f64, f64) {
    let (mut lo, mut hi) = p.support_edges();
    if p.lower_edge_at_zero() {
        lo = 0.0;
    }
    if p.upper_edge_at_one() {
        hi = 1.0;
    }
    (lo, hi)
}

/// `A x² − B x + C` at both support edges.
pub fn edge_polynomial_residuals(p: &JacobiParams) -> (f64, f64) {
    let (lo, hi) = support_edges(p);
    let f = |x: f64| (p.a_coef() * x - p.b_coef()) * x + p.c_coef();
    (f(lo), f(hi))
}

/// Atom masses `(a₀, a₁)` at 0 and 1.
pub fn stationary_atoms(p: &JacobiParams) -> (f64, f64) {
    ((1.0 - p.l()).max(0.0), (1.0 - p.k()).max(0.0))
}

fn density_from_offsets(p: &JacobiParams, d_lo: f64, d_hi: f64, x: f64, one_minus_x: f64) -> f64 {
    libm::sqrt(d_lo * d_hi) / (2.0 * PI * p.alpha() * x * one_minus_x)
}

/// Density value at a quadrature abscissa of a rule on `[x₋, x₊]`, with the
/// edge distances taken from the abscissa.
fn density_at(p: &JacobiParams, lo: f64, hi: f64, a: Abscissa) -> f64 {
    let x = if lo == 0.0 { a.from_lo } else { a.x };
    let omx = if hi == 1.0 { a.from_hi } else { (1.0 - hi) + a.from_hi };
    density_from_offsets(p, a.from_lo, a.from_hi, x, omx)
}

/// The density `g(x)`, zero outside `(x₋, x₊)` and at interior edges.
///
/// When an edge sits at 0 (`λ = 1`) or at 1 (`θ(λ + 1) = 1`), `g` blows up
/// like an inverse square root there, and evaluating exactly at that point
/// is a domain error.
pub fn stationary_density(p: &JacobiParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            op: "stationary_density",
            re: x,
            im: 0.0,
        });
    }
    let (lo, hi) = support_edges(p);
    if (x == 0.0 && lo == 0.0) || (x == 1.0 && hi == 1.0) {
        return Err(Error::Domain {
            op: "stationary_density (integrable blow-up at the edge)",
            re: x,
            im: 0.0,
        });
    }
    if x <= lo || x >= hi {
        return Ok(0.0);
    }
    Ok(density_from_offsets(p, x - lo, hi - x, x, 1.0 - x))
}

/// The stationary law sampled on the edge-graded grid of `n` points.
pub fn stationary_measure(p: &JacobiParams, n: usize) -> Result<SpectralMeasure> {
    let (lo, hi) = support_edges(p);
    let (a0, a1) = stationary_atoms(p);
    SpectralMeasure::from_density_edge(a0, a1, lo, hi, n, |a| Ok(density_at(p, lo, hi, a)))
}

/// `∫ f(x) g(x) dx` over the support with the standard edge rule, where `f`
/// receives the full abscissa.
pub fn integrate_against_density<F>(p: &JacobiParams, mut f: F) -> Result<f64>
where
    F: FnMut(Abscissa) -> f64,
{
    let (lo, hi) = support_edges(p);
    EdgeRule::edge_exact(lo, hi)?.integrate_edge(|a| f(a) * density_at(p, lo, hi, a))
}

/// Distribution function `F(x) = μ([0, x])`, atoms included.
///
/// The continuous part is integrated from whichever support edge is
/// nearer to `x`, so the square-root edge is always an endpoint of the
/// rule and is handled through exact offsets.
pub fn stationary_cdf(p: &JacobiParams, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain {
            op: "stationary_cdf",
            re: x,
            im: 0.0,
        });
    }
    if x < 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let (a0, a1) = stationary_atoms(p);
    let (lo, hi) = support_edges(p);
    if x <= lo {
        return Ok(a0);
    }
    if x >= hi {
        return Ok(1.0 - a1);
    }
    let at = |d_lo: f64, d_hi: f64, xv: f64| {
        let xx = if lo == 0.0 { d_lo } else { xv };
        let omx = if hi == 1.0 { d_hi } else { 1.0 - xv };
        density_from_offsets(p, d_lo, d_hi, xx, omx)
    };
    // Within this distance of an edge the rule cannot resolve the interval;
    // there the density is a pure power of the edge distance `s`, either
    // `φ√s` or `φ/√s` at a hard edge, and is integrated in closed form.
    let narrow = 1e-12;
    let edge_power = |w: f64, g_mid: f64, hard: bool| {
        if hard {
            g_mid * libm::sqrt(0.5 * w) * 2.0 * libm::sqrt(w)
        } else {
            g_mid * (2.0 / 3.0) * w * libm::sqrt(2.0)
        }
    };
    if x - lo <= hi - x {
        let w = x - lo;
        let gap = hi - x;
        let part = if w < narrow {
            edge_power(w, at(0.5 * w, gap + 0.5 * w, lo + 0.5 * w), lo == 0.0)
        } else {
            EdgeRule::edge_exact(lo, x)?.integrate_edge(|a| at(a.from_lo, gap + a.from_hi, a.x))?
        };
        Ok((a0 + part).min(1.0))
    } else {
        let w = hi - x;
        let gap = x - lo;
        let part = if w < narrow {
            edge_power(w, at(gap + 0.5 * w, 0.5 * w, hi - 0.5 * w), hi == 1.0)
        } else {
            EdgeRule::edge_exact(x, hi)?.integrate_edge(|a| at(gap + a.from_lo, a.from_hi, a.x))?
        };
        Ok((1.0 - a1 - part).max(0.0))
    }
}

/// `√(Az² − Bz + C)` continued from infinity, written as
/// `r √(z − x₋) √(z − x₊)` with principal roots. The product of principal
/// roots is analytic off `[x₋, x₊]` and behaves like `rz` at infinity.
fn edge_root(p: &JacobiParams, z: Complex64) -> Complex64 {
    let (lo, hi) = support_edges(p);
    p.r() * (z - lo).sqrt() * (z - hi).sqrt()
}

/// The Cauchy transform
/// `G(z) = ((2 − r)z + (1/λ − 1) + √(Az² − Bz + C)) / (2z(z − 1))` of the
/// stationary law, on the branch with `zG(z) → 1` at infinity.
pub fn stationary_cauchy(p: &JacobiParams, z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) || (z.im == 0.0 && (0.0..=1.0).contains(&z.re)) {
        return Err(Error::Domain {
            op: "stationary_cauchy",
            re: z.re,
            im: z.im,
        });
    }
    let w = edge_root(p, z);
    let num = (2.0 - p.r()) * z + (p.l() - 1.0) + w;
    Ok(num / (2.0 * z * (z - 1.0)))
}

/// R-transform `R_a(z) = (z − 1 + √((z−1)² + 4θz)) / (2z)` of the two-point
/// law `(1−θ)δ₀ + θδ₁`.
///
/// Evaluated as `2θ/(1 − z + s(z))` with
/// `s(z) = √(1 − z/z₁) √(1 − z/z₂)` and `z₁,₂ = 1 − 2θ ± 2i√(θ(1−θ))` the
/// branch points, which lie on the unit circle. The branch with
/// `s(0) = 1` is continuous on the open unit disc; arguments with
/// `|z| ≥ 1` are refused.
pub fn projection_r_transform(theta: f64, z: Complex64) -> Result<Complex64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameters {
            lambda: f64::NAN,
            theta,
            reason: "theta must lie in (0, 1)",
        });
    }
    if !(z.norm() < 1.0) {
        return Err(Error::Branch { re: z.re, im: z.im });
    }
    let im = 2.0 * libm::sqrt(theta * (1.0 - theta));
    let z1 = Complex64::new(1.0 - 2.0 * theta, im);
    let z2 = z1.conj();
    let one = Complex64::new(1.0, 0.0);
    let s = (one - z / z1).sqrt() * (one - z / z2).sqrt();
    Ok(2.0 * theta / (one - z + s))
}

/// `R(z) = R_a(λθ z)`, the R-transform of the stationary law.
pub fn compressed_r_transform(p: &JacobiParams, z: Complex64) -> Result<Complex64> {
    projection_r_transform(p.theta(), p.alpha() * z)
        .map_err(|_| Error::Branch { re: z.re, im: z.im })
}

/// `K(z) = R(z) + 1/z`, the functional inverse of the stationary `G`.
pub fn k_transform(p: &JacobiParams, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain {
            op: "k_transform",
            re: 0.0,
            im: 0.0,
        });
    }
    Ok(compressed_r_transform(p, z)? + 1.0 / z)
}

/// How a stationary moment was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMethod {
    /// The ₂F₁ ladder.
    Ladder,
    /// Direct quadrature against the density, either because an atom at 0
    /// is present or because the ladder lost too many digits.
    Quadrature,
    /// The ladder was attempted and abandoned as ill-conditioned.
    QuadratureFallback,
}

/// A stationary moment with its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryMoment {
    pub value: f64,
    pub method: MomentMethod,
}

/// Terminating `₂F₁(1−n, 3/2; 3; w)` together with the ratio of the sum of
/// absolute terms to the absolute sum.
fn ladder_hyp(n: usize, w: f64) -> (f64, f64) {
    let a = 1.0 - n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut abs_sum = 1.0;
    for k in 0..n.saturating_sub(1) {
        let kf = k as f64;
        term *= (a + kf) * (1.5 + kf) / ((3.0 + kf) * (kf + 1.0)) * w;
        sum += term;
        abs_sum += term.abs();
    }
    (sum, abs_sum / sum.abs().max(f64::MIN_POSITIVE))
}

/// Moments `m₀ … m_N` by quadrature: `m_n = a₁ + ∫ xⁿ g(x) dx`.
pub fn stationary_moments_quadrature(p: &JacobiParams, n_max: usize) -> Result<Vec<f64>> {
    let (a0, a1) = stationary_atoms(p);
    let (lo, hi) = support_edges(p);
    let rule = EdgeRule::edge_exact(lo, hi)?;
    let mut pw: Vec<f64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&a, &w)| w * density_at(p, lo, hi, a))
        .collect();
    let mut m = Vec::with_capacity(n_max + 1);
    m.push(a0 + a1 + pw.iter().sum::<f64>());
    for _ in 1..=n_max {
        let mut s = 0.0;
        for (v, a) in pw.iter_mut().zip(rule.nodes()) {
            *v *= a.x;
            s += *v;
        }
        m.push(a1 + s);
    }
    Ok(m)
}

/// Moments `m₀ … m_N` of the stationary law.
///
/// Without an atom at 0 the ladder
///
/// ```text
/// m₁ = 1 − K(π/2)(√x₊ − √x₋)²,
/// m_{n+1} = m_n − (Kπ/8)(x₊ − x₋)² x₊^{n−1} ₂F₁(1−n, 3/2; 3; (x₊−x₋)/x₊),
/// ```
///
/// with `K = 1/(2πλθ)` is used. A rung whose hypergeometric sum loses more
/// than six digits to cancellation switches the remaining moments to
/// quadrature. An atom at 0 sends every moment to quadrature.
pub fn stationary_moments(p: &JacobiParams, n_max: usize) -> Result<Vec<StationaryMoment>> {
    let (a0, _) = stationary_atoms(p);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(StationaryMoment {
        value: 1.0,
        method: MomentMethod::Ladder,
    });
    if n_max == 0 {
        return Ok(out);
    }
    if a0 > 0.0 {
        let q = stationary_moments_quadrature(p, n_max)?;
        out[0].method = MomentMethod::Quadrature;
        out.extend(q.into_iter().skip(1).map(|value| StationaryMoment {
            value,
            method: MomentMethod::Quadrature,
        }));
        return Ok(out);
    }
    let (lo, hi) = support_edges(p);
    let k = 1.0 / (2.0 * PI * p.alpha());
    let gap = libm::sqrt(hi) - libm::sqrt(lo);
    let mut m = 1.0 - k * (PI / 2.0) * gap * gap;
    out.push(StationaryMoment {
        value: m,
        method: MomentMethod::Ladder,
    });
    let width = hi - lo;
    let w = width / hi;
    let scale = k * PI * width * width / 8.0;
    for n in 1..n_max {
        let (h, cond) = ladder_hyp(n, w);
        if cond > LADDER_CONDITION_LIMIT {
            let q = stationary_moments_quadrature(p, n_max)?;
            out.extend(q.into_iter().skip(n + 1).map(|value| StationaryMoment {
                value,
                method: MomentMethod::QuadratureFallback,
            }));
            return Ok(out);
        }
        m -= scale * libm::pow(hi, n as f64 - 1.0) * h;
        out.push(StationaryMoment {
            value: m,
            method: MomentMethod::Ladder,
        });
    }
    Ok(out)
}

/// The single moment `m_n`; see [`stationary_moments`].
pub fn stationary_moment(p: &JacobiParams, n: usize) -> Result<StationaryMoment> {
    Ok(stationary_moments(p, n)?[n])
}

/// `x log x` with the convention `0 log 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

fn check_sde_regime(p: &JacobiParams, op: &'static str) -> Result<()> {
    if p.sde_valid() {
        Ok(())
    } else {
        Err(Error::InvalidParameters {
            lambda: p.lambda(),
            theta: p.theta(),
            reason: op,
        })
    }
}

/// `(Φ̃(log(P − J)), Φ̃(log J))` under the stationary law, for
/// `λ ≤ 1 ≤ 1/θ − λ`.
///
/// ```text
/// Φ̃(log(P−J)) = ((1−θ)log(1−θ) + (1−λθ)log(1−λθ)
///               − (1−θ(λ+1))log(1−θ(λ+1))) / (λθ)
/// ```
///
/// and `Φ̃(log J)` is the same expression at `(λθ/(1−θ), 1−θ)`, the
/// parameters of `P − J`.
pub fn stationary_log_potentials(p: &JacobiParams) -> Result<(f64, f64)> {
    check_sde_regime(p, "log-potentials need lambda <= 1 and theta(lambda + 1) <= 1")?;
    let f = |lambda: f64, theta: f64| {
        let a = lambda * theta;
        (xlogx(1.0 - theta) + xlogx(1.0 - a) - xlogx(1.0 - theta * (lambda + 1.0))) / a
    };
    let lam = p.lambda();
    let th = p.theta();
    Ok((f(lam, th), f(lam * th / (1.0 - th), 1.0 - th)))
}

/// `2Φ̃(log(P − J))` from its integral representation
///
/// ```text
/// −∫₀¹ ((1 + 1/λ)z − r + √(Cz² − Bz + A)) / (z(1 − z)) dz.
/// ```
///
/// Rationalizing the numerator against `√(Cz² − Bz + A) − (1+1/λ)z + r`
/// leaves `(4/λ)(1 − z)z` on top, so the integrand equals
/// `(4/λ) / (√(Cz² − Bz + A) + r − (1 + 1/λ)z)` with no cancellation at
/// either endpoint. The root is formed as `r√((1 − x₊z)(1 − x₋z))`.
pub fn log_potential_integral(p: &JacobiParams) -> Result<f64> {
    check_sde_regime(p, "the log-potential integral needs lambda <= 1 and theta(lambda + 1) <= 1")?;
    let (lo, hi) = support_edges(p);
    let r = p.r();
    let c1 = 1.0 + p.l();
    let v = crate::quad::quadrature_edge(
        |a| {
            let z = a.x;
            let f_hi = (1.0 - hi) + hi * a.from_hi;
            let f_lo = 1.0 - lo * z;
            let root = r * libm::sqrt(f_hi * f_lo);
            // r − (1 + 1/λ)z = (r − 1 − 1/λ) + (1 + 1/λ)(1 − z)
            let den = root + (r - c1) + c1 * a.from_hi;
            (4.0 / p.lambda()) / den
        },
        0.0,
        1.0,
    )?;
    Ok(-v)
}
