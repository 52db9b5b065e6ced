//! Edge-aware Gauss–Legendre quadrature on bounded intervals.
//!
//! Each half of `[a, b]` is mapped through `x = a + w sin²ψ` (lower half) or
//! `x = b − w sin²ψ` (upper half) with `w = b − a` and `ψ ∈ [0, π/4]`. The
//! Jacobian `w sin 2ψ` cancels inverse square-root endpoint behaviour, and
//! the `ψ` range is split into geometrically graded panels toward `ψ = 0`
//! so that logarithmic endpoint factors are also resolved. Each panel
//! carries a fixed-order Gauss–Legendre rule.
//!
//! The grading ratio adapts to the floating-point spacing at each endpoint:
//! no node is placed so close to an endpoint that its abscissa would round
//! onto it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut t = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() <= 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, t);
        if d.is_finite() {
            dp = d;
        }
        let wgt = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = wgt;
        weights[n - 1 - i] = wgt;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// A quadrature abscissa together with its distances to both endpoints,
/// computed without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lo: f64,
    pub from_hi: f64,
}

#[derive(Clone, Debug)]
struct Panel {
    /// Node indices `start..start + len` (in increasing `x`).
    start: usize,
    psi_lo: f64,
    psi_hi: f64,
    upper: bool,
}

/// A composite rule on `[a, b]` built from two graded halves.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    lo: f64,
    hi: f64,
    order: usize,
    nodes: Vec<Abscissa>,
    psi: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
    bary: Vec<f64>,
}

/// Ratio `r` such that the smallest node of a panel sequence
/// `[0, s r^{P-1}], …, [s r, s]` stays resolvable next to `endpoint`.
fn grading_ratio(endpoint: f64, width: f64, panels: usize, first_node: f64) -> f64 {
    if panels <= 1 {
        return 0.5;
    }
    let spacing = if endpoint == 0.0 {
        f64::MIN_POSITIVE
    } else {
        4.0 * f64::EPSILON * endpoint.abs()
    };
    let psi_needed = libm::sqrt(spacing / width);
    let ratio = libm::pow(
        psi_needed / (first_node * FRAC_PI_4),
        1.0 / (panels as f64 - 1.0),
    );
    ratio.clamp(0.5, 0.95)
}

impl EdgeRule {
    /// Panels per half and per-panel order used by [`quadrature`].
    pub const STANDARD: (usize, usize) = (24, 16);

    /// Panels per half and per-panel order used by [`quadrature_edge`].
    pub const EDGE_EXACT: (usize, usize) = (48, 16);

    pub fn new(a: f64, b: f64, panels_per_half: usize, order: usize) -> Result<Self> {
        Self::build(a, b, panels_per_half, order, true)
    }

    /// A rule graded by halving toward both endpoints regardless of the
    /// floating-point spacing there. Abscissae may round onto an endpoint,
    /// so it is meant for [`EdgeRule::integrate_edge`], whose integrands
    /// use the exact endpoint distances.
    pub fn new_edge_exact(a: f64, b: f64, panels_per_half: usize, order: usize) -> Result<Self> {
        Self::build(a, b, panels_per_half, order, false)
    }

    fn build(a: f64, b: f64, panels_per_half: usize, order: usize, ulp_safe: bool) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput("quadrature interval must satisfy a < b"));
        }
        if panels_per_half == 0 || order == 0 {
            return Err(Error::InvalidInput("quadrature needs at least one panel and node"));
        }
        let width = b - a;
        if width < 1e-12 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::InvalidInput("quadrature interval too narrow"));
        }
        let (t, wt) = gauss_legendre(order);
        let first_node = (1.0 + t[0]) / 2.0;
        let bary = barycentric_weights(&t);

        let mut nodes = Vec::with_capacity(2 * panels_per_half * order);
        let mut psi = Vec::with_capacity(nodes.capacity());
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut panels = Vec::with_capacity(2 * panels_per_half);

        let breaks = |ratio: f64| -> Vec<f64> {
            let mut v = vec![0.0; panels_per_half + 1];
            for (j, item) in v.iter_mut().enumerate().skip(1) {
                *item = FRAC_PI_4 * libm::pow(ratio, (panels_per_half - j) as f64);
            }
            v[panels_per_half] = FRAC_PI_4;
            v
        };
        let ratio = |end: f64| {
            if ulp_safe {
                grading_ratio(end, width, panels_per_half, first_node)
            } else {
                0.5
            }
        };
        let lower = breaks(ratio(a));
        let upper = breaks(ratio(b));

        let mut push = |p0: f64, p1: f64, upper_half: bool| {
            let start = nodes.len();
            let half = 0.5 * (p1 - p0);
            let mid = 0.5 * (p1 + p0);
            let mut local: Vec<(Abscissa, f64, f64)> = (0..order)
                .map(|k| {
                    let s = mid + half * t[k];
                    let sn = libm::sin(s);
                    let cs = libm::cos(s);
                    let near = width * sn * sn;
                    let far = width * cs * cs;
                    let jac = width * libm::sin(2.0 * s) * half * wt[k];
                    let ab = if upper_half {
                        Abscissa {
                            x: b - near,
                            from_lo: far,
                            from_hi: near,
                        }
                    } else {
                        Abscissa {
                            x: a + near,
                            from_lo: near,
                            from_hi: far,
                        }
                    };
                    (ab, s, jac)
                })
                .collect();
            if upper_half {
                local.reverse();
            }
            for (ab, s, jac) in local {
                nodes.push(ab);
                psi.push(s);
                weights.push(jac);
            }
            panels.push(Panel {
                start,
                psi_lo: p0,
                psi_hi: p1,
                upper: upper_half,
            });
        };
        for j in 0..panels_per_half {
            push(lower[j], lower[j + 1], false);
        }
        for j in (0..panels_per_half).rev() {
            push(upper[j], upper[j + 1], true);
        }

        Ok(Self {
            lo: a,
            hi: b,
            order,
            nodes,
            psi,
            weights,
            panels,
            bary,
        })
    }

    /// The rule used by [`quadrature`].
    pub fn standard(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, Self::STANDARD.0, Self::STANDARD.1)
    }

    /// The rule used by [`quadrature_edge`].
    pub fn edge_exact(a: f64, b: f64) -> Result<Self> {
        Self::new_edge_exact(a, b, Self::EDGE_EXACT.0, Self::EDGE_EXACT.1)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Abscissa] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f(x)` over the interval. Nodes that round onto an
    /// endpoint are skipped.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        self.sum(|ab| f(ab.x), true)
    }

    /// Integrates a function that receives the full [`Abscissa`], so that
    /// factors such as `log(1 − x)` can be formed from `from_hi` exactly.
    pub fn integrate_edge<F: FnMut(Abscissa) -> f64>(&self, f: F) -> Result<f64> {
        self.sum(f, false)
    }

    fn sum<F: FnMut(Abscissa) -> f64>(&self, mut f: F, skip_endpoints: bool) -> Result<f64> {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (ab, &w) in self.nodes.iter().zip(&self.weights) {
            if skip_endpoints && (ab.x <= self.lo || ab.x >= self.hi) {
                continue;
            }
            let v = f(*ab);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    op: "quadrature",
                    abscissa: ab.x,
                });
            }
            // Neumaier summation keeps the sum accurate when the graded
            // panels produce terms of very different sizes.
            let term = v * w;
            let s = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - s) + term;
            } else {
                comp += (term - s) + sum;
            }
            sum = s;
        }
        Ok(sum + comp)
    }

    fn psi_of(&self, x: f64) -> (f64, bool) {
        let width = self.hi - self.lo;
        let mid = self.lo + 0.5 * width;
        if x <= mid {
            let s = ((x - self.lo) / width).clamp(0.0, 1.0);
            (libm::asin(libm::sqrt(s)), false)
        } else {
            let s = ((self.hi - x) / width).clamp(0.0, 1.0);
            (libm::asin(libm::sqrt(s)), true)
        }
    }

    /// Interpolates node values at `x` with the polynomial of the panel
    /// containing `x` (in the `ψ` variable). Returns the value and its
    /// derivative with respect to `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> (f64, f64) {
        debug_assert_eq!(values.len(), self.nodes.len());
        let (s, upper) = self.psi_of(x);
        let s = s.clamp(0.0, FRAC_PI_4);
        let panel = self
            .panels
            .iter()
            .filter(|p| p.upper == upper)
            .find(|p| s >= p.psi_lo && s <= p.psi_hi)
            .or_else(|| {
                self.panels
                    .iter()
                    .filter(|p| p.upper == upper)
                    .max_by(|a, b| a.psi_hi.total_cmp(&b.psi_hi))
            })
            .expect("rule has panels on both halves");
        let q = self.order;
        let idx: Vec<usize> = if panel.upper {
            (0..q).rev().map(|k| panel.start + k).collect()
        } else {
            (0..q).map(|k| panel.start + k).collect()
        };
        // `idx[k]` is the node with Gauss index k inside the panel.
        let ps: Vec<f64> = idx.iter().map(|&i| self.psi[i]).collect();
        let fs: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        let (p, dp) = barycentric_eval(&ps, &fs, &self.bary, s);
        let width = self.hi - self.lo;
        let dxdpsi = width * libm::sin(2.0 * s) * if upper { -1.0 } else { 1.0 };
        let dx = if dxdpsi.abs() > 0.0 { dp / dxdpsi } else { 0.0 };
        (p, dx)
    }
}

fn barycentric_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= t[j] - t[k];
            }
        }
    }
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut w {
        *v /= scale;
    }
    w
}

/// Value and derivative of the interpolant through `(xs, fs)` at `x`.
/// Barycentric weights are scale invariant, so weights for the reference
/// nodes serve any affine image of them.
fn barycentric_eval(xs: &[f64], fs: &[f64], w: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    let tol = 1e-14 * (xs[n - 1] - xs[0]).abs().max(f64::MIN_POSITIVE);
    if let Some(j) = xs.iter().position(|&xj| (x - xj).abs() <= tol) {
        let mut d = 0.0;
        for k in 0..n {
            if k != j {
                d += (w[k] / w[j]) * (fs[k] - fs[j]) / (xs[j] - xs[k]);
            }
        }
        return (fs[j], d);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n {
        let c = w[k] / (x - xs[k]);
        num += c * fs[k];
        den += c;
    }
    let p = num / den;
    let mut dnum = 0.0;
    for k in 0..n {
        let dx = x - xs[k];
        dnum += w[k] * (p - fs[k]) / (dx * dx);
    }
    (p, dnum / den)
}

/// `∫_a^b f(x) dx` with the standard edge-aware rule.
///
/// Integrable endpoint singularities of inverse square-root and logarithmic
/// type are handled. A non-finite sample at an interior node is reported
/// with its abscissa.
pub fn quadrature<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    EdgeRule::standard(a, b)?.integrate(f)
}

/// Like [`quadrature`], with the integrand receiving endpoint distances.
///
/// Because the endpoint distances are exact, the rule can be graded far
/// closer to the endpoints than abscissae in `f64` could resolve, which
/// matters for logarithmic endpoint factors.
pub fn quadrature_edge<F: FnMut(Abscissa) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    EdgeRule::edge_exact(a, b)?.integrate_edge(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{LN_2, PI};

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (t, w) = gauss_legendre(7);
        let s: f64 = t.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_integrates_to_length() {
        assert!((quadrature(|_| 1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn arcsine_normalizes() {
        let v = quadrature(|x| 1.0 / (PI * libm::sqrt(x * (1.0 - x))), 0.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        let e = quadrature_edge(|a| 1.0 / (PI * libm::sqrt(a.from_lo * a.from_hi)), 0.0, 1.0).unwrap();
        assert!((e - 1.0).abs() < 1e-14, "{e}");
    }

    #[test]
    fn log_weighted_arcsine() {
        let v = quadrature(
            |x| libm::log(1.0 - x) / (PI * libm::sqrt(x * (1.0 - x))),
            0.0,
            1.0,
        )
        .unwrap();
        assert!((v + 2.0 * LN_2).abs() < 1e-7, "{v}");
        let e = quadrature_edge(
            |a| libm::log(a.from_hi) / (PI * libm::sqrt(a.from_lo * a.from_hi)),
            0.0,
            1.0,
        )
        .unwrap();
        assert!((e + 2.0 * LN_2).abs() < 1e-13, "{e}");
    }

    #[test]
    fn smooth_function_on_shifted_interval() {
        let v = quadrature(libm::exp, 0.3, 0.9).unwrap();
        assert!((v - (libm::exp(0.9) - libm::exp(0.3))).abs() < 1e-13);
    }

    #[test]
    fn nan_reports_abscissa() {
        let err = quadrature(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0).unwrap_err();
        match err {
            Error::NonFinite { abscissa, .. } => assert!(abscissa > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nodes_are_strictly_increasing_and_interior() {
        for &(a, b) in &[(0.0, 1.0), (0.066, 0.933), (0.5, 1.0), (0.2, 0.2001)] {
            let r = EdgeRule::new(a, b, 32, 32).unwrap();
            let xs: Vec<f64> = r.nodes().iter().map(|n| n.x).collect();
            assert!(xs.windows(2).all(|w| w[0] < w[1]), "{a} {b}");
            assert!(xs[0] > a && xs[xs.len() - 1] < b);
        }
    }

    #[test]
    fn interpolation_recovers_smooth_values_and_slopes() {
        let r = EdgeRule::new(0.1, 0.9, 32, 16).unwrap();
        let f = |x: f64| libm::sqrt((x - 0.1) * (0.9 - x));
        let vals: Vec<f64> = r.nodes().iter().map(|n| f(n.x)).collect();
        for &x in &[0.11, 0.3, 0.5, 0.77, 0.899] {
            let (v, d) = r.interpolate(&vals, x);
            let exact_d = (1.0 - 2.0 * x) / (2.0 * f(x));
            assert!((v - f(x)).abs() < 1e-12, "{x}");
            assert!((d - exact_d).abs() < 1e-8 * exact_d.abs().max(1.0), "{x} {d} {exact_d}");
        }
    }
}
