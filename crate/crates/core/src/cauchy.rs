//! Evolution of the Cauchy transform `G_t(z) = Φ̃((z − J_t)⁻¹)`.
//!
//! `G_t` solves
//!
//! ```text
//! ∂_t G = (1 − 2λθ)G + λθ(2z − 1)G² + ((1 − 2λθ)z − θ(1 − λ))G′ + 2λθ z(z − 1)GG′
//! ```
//!
//! with `G′ = ∂_z G`. Samples live on a [`Contour`]. A horizontal segment
//! above the support is used to check the right-hand side with finite
//! differences. Time stepping runs on a circle enclosing `[0, 1]`: `G_t`
//! is holomorphic outside the circle and vanishes at infinity, so it is
//! represented by its negative Fourier modes there. Every stage of the
//! integrator projects onto those modes. On a segment the same equation
//! has inflow at both ends and admits growing non-holomorphic modes, so
//! time stepping there is refused.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft;
use crate::params::JacobiParams;

/// Points excluded at each end of a segment from the trusted region.
pub const SEGMENT_MARGIN: usize = 5;

/// Where a [`ContourSample`] lives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    /// `n` points `x_lo + jΔx + i y0`, uniformly spaced.
    Segment { x_lo: f64, x_hi: f64, y0: f64, n: usize },
    /// `n` points `center + radius·e^{2πij/n}` (`n` a power of two).
    Circle { center: f64, radius: f64, n: usize },
}

impl Contour {
    pub fn segment(x_lo: f64, x_hi: f64, y0: f64, n: usize) -> Result<Self> {
        if !(x_lo < x_hi && y0 > 0.0 && x_lo.is_finite() && x_hi.is_finite() && y0.is_finite()) {
            return Err(Error::InvalidInput("segment needs x_lo < x_hi and y0 > 0"));
        }
        if n < 5 {
            return Err(Error::Stencil { points: n, required: 5 });
        }
        Ok(Contour::Segment { x_lo, x_hi, y0, n })
    }

    /// Segment with spacing `dx`, which must divide `x_hi − x_lo` to within
    /// rounding.
    pub fn segment_with_spacing(x_lo: f64, x_hi: f64, y0: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidInput("segment spacing must be positive"));
        }
        let cells = libm::round((x_hi - x_lo) / dx);
        if (cells * dx - (x_hi - x_lo)).abs() > 1e-9 * (x_hi - x_lo).abs() {
            return Err(Error::InvalidInput("segment spacing must divide its length"));
        }
        Self::segment(x_lo, x_hi, y0, cells as usize + 1)
    }

    pub fn circle(center: f64, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(Error::InvalidInput("circle needs a finite positive radius"));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput("circle point count must be a power of two >= 8"));
        }
        Ok(Contour::Circle { center, radius, n })
    }

    /// The default circle for time stepping: center 1/2, radius 1, 256 points.
    pub fn default_circle() -> Self {
        Contour::Circle {
            center: 0.5,
            radius: 1.0,
            n: 256,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Contour::Segment { n, .. } | Contour::Circle { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            Contour::Segment { x_lo, x_hi, y0, n } => {
                let dx = (x_hi - x_lo) / (n - 1) as f64;
                (0..n)
                    .map(|j| Complex64::new(x_lo + j as f64 * dx, y0))
                    .collect()
            }
            Contour::Circle { center, radius, n } => (0..n)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / n as f64;
                    // The two real-axis points get an exact zero imaginary part.
                    let im = if j == 0 || 2 * j == n { 0.0 } else { radius * libm::sin(phi) };
                    Complex64::new(center + radius * libm::cos(phi), im)
                })
                .collect(),
        }
    }

    /// Indices whose derivative estimate is trusted.
    pub fn trust_region(&self) -> Range<usize> {
        match *self {
            Contour::Segment { n, .. } => SEGMENT_MARGIN.min(n / 2)..n.saturating_sub(SEGMENT_MARGIN).max(n / 2),
            Contour::Circle { n, .. } => 0..n,
        }
    }
}

/// Values of `G_t` on a contour.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSample {
    pub contour: Contour,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl ContourSample {
    pub fn from_fn<F>(contour: Contour, t: f64, mut g: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let points = contour.points();
        let values = points.iter().map(|&z| g(z)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            contour,
            points,
            values,
            t,
        })
    }

    /// `Im G < 0` wherever `Im z > 0`, and `Im G > 0` wherever `Im z < 0`.
    pub fn herglotz_ok(&self) -> bool {
        self.herglotz_violation().is_none()
    }

    /// First index breaking the Herglotz sign condition.
    pub fn herglotz_violation(&self) -> Option<usize> {
        // Below this |Im z| the sign of Im G is lost in rounding.
        self.points.iter().zip(&self.values).position(|(z, g)| {
            let scale = 1e-12 * z.norm().max(1.0);
            (z.im > scale && !(g.im < 0.0)) || (z.im < -scale && !(g.im > 0.0))
        })
    }

    /// `|zG(z) − 1| ≤ 2/|z|` at segment endpoints with `|z| ≥ 10`.
    pub fn far_field_ok(&self) -> bool {
        let n = self.points.len();
        [0, n.saturating_sub(1)].iter().all(|&i| {
            let z = self.points[i];
            z.norm() < 10.0 || (z * self.values[i] - 1.0).norm() <= 2.0 / z.norm()
        })
    }

    /// `∂_z G` at every point: fourth-order differences along a segment,
    /// spectral differentiation on a circle.
    pub fn derivative(&self) -> Result<Vec<Complex64>> {
        match self.contour {
            Contour::Segment { x_lo, x_hi, n, .. } => {
                if n < 5 {
                    return Err(Error::Stencil { points: n, required: 5 });
                }
                let dx = (x_hi - x_lo) / (n - 1) as f64;
                Ok(fd4(&self.values, dx))
            }
            Contour::Circle { center, .. } => Ok(spectral_derivative(&self.values, &self.points, center)),
        }
    }

    /// Laurent coefficients `b_j` of `G(z) = Σ_{j≥0} b_j (z − c)^{−j−1}`
    /// extracted on a circle, `j = 0 … n/2 − 2`.
    pub fn laurent_coefficients(&self) -> Result<Vec<Complex64>> {
        let (radius, n) = match self.contour {
            Contour::Circle { radius, n, .. } => (radius, n),
            Contour::Segment { .. } => {
                return Err(Error::InvalidInput("Laurent coefficients need a circle contour"))
            }
        };
        let modes = exterior_modes(&self.values);
        Ok((0..n / 2 - 1)
            .map(|j| modes[j] * libm::pow(radius, j as f64 + 1.0))
            .collect())
    }

    /// Evaluates the exterior expansion at `z` with `|z − c| ≥ radius`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let (center, radius, n) = match self.contour {
            Contour::Circle { center, radius, n } => (center, radius, n),
            Contour::Segment { .. } => {
                return Err(Error::InvalidInput("evaluation off the contour needs a circle"))
            }
        };
        let w = z - center;
        if w.norm() < radius * (1.0 - 1e-12) {
            return Err(Error::Domain {
                op: "ContourSample::evaluate (inside the circle)",
                re: z.re,
                im: z.im,
            });
        }
        // Σ_j a_j (R/w)^{j+1} with a_j the Fourier coefficient of e^{−i(j+1)φ}.
        let modes = exterior_modes(&self.values);
        let q = radius / w;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in modes[..n / 2 - 1].iter().rev() {
            acc = (acc + a) * q;
        }
        Ok(acc)
    }
}

fn fd4(f: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = f.len();
    let s = 1.0 / (12.0 * dx);
    let mut d = alloc::vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * s;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
    d
}

/// Normalized Fourier coefficients of `e^{−i(j+1)φ}`, `j = 0 … n/2 − 1`.
fn exterior_modes(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft(&mut buf, false);
    (0..n / 2).map(|j| buf[n - 1 - j] / n as f64).collect()
}

/// Keeps the modes `e^{ikφ}` with `−n/2 < k < 0`.
fn project(values: &mut [Complex64]) {
    let n = values.len();
    fft(values, false);
    for (k, v) in values.iter_mut().enumerate() {
        if k <= n / 2 {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft(values, true);
    let s = 1.0 / n as f64;
    for v in values.iter_mut() {
        *v *= s;
    }
}

fn spectral_derivative(values: &[Complex64], points: &[Complex64], center: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft(&mut buf, false);
    for (k, v) in buf.iter_mut().enumerate() {
        let kk = if k < n / 2 {
            k as f64
        } else if k == n / 2 {
            0.0
        } else {
            k as f64 - n as f64
        };
        *v *= Complex64::new(0.0, kk);
    }
    fft(&mut buf, true);
    // dG/dz = (dG/dφ) / (i (z − c))
    buf.iter()
        .zip(points)
        .map(|(d, z)| d / (n as f64 * Complex64::new(0.0, 1.0) * (z - center)))
        .collect()
}

fn rhs_pointwise(p: &JacobiParams, z: &[Complex64], g: &[Complex64], dg: &[Complex64]) -> Vec<Complex64> {
    let a = p.alpha();
    let th = p.theta();
    let lam = p.lambda();
    z.iter()
        .zip(g)
        .zip(dg)
        .map(|((&z, &g), &d)| {
            (1.0 - 2.0 * a) * g
                + a * (2.0 * z - 1.0) * g * g
                + ((1.0 - 2.0 * a) * z - th * (1.0 - lam)) * d
                + 2.0 * a * z * (z - 1.0) * g * d
        })
        .collect()
}

/// `∂_t G` at every contour point.
pub fn pde_rhs(sample: &ContourSample, params: &JacobiParams) -> Result<Vec<Complex64>> {
    let d = sample.derivative()?;
    Ok(rhs_pointwise(params, &sample.points, &sample.values, &d))
}

/// Largest `|c(z)| (n/2)/R` over the circle, with `c(z)` the transport
/// coefficient multiplying `G′`. RK4 is stable for `h` times this below
/// about 2.8.
fn spectral_radius_estimate(p: &JacobiParams, s: &ContourSample, radius: f64) -> f64 {
    let a = p.alpha();
    let kmax = (s.points.len() / 2) as f64 / radius;
    s.points
        .iter()
        .zip(&s.values)
        .map(|(&z, &g)| {
            let c = (1.0 - 2.0 * a) * z - p.theta() * (1.0 - p.lambda()) + 2.0 * a * z * (z - 1.0) * g;
            c.norm() * kmax
        })
        .fold(0.0, f64::max)
}

/// Integrates the evolution with classical RK4 on a circle enclosing
/// `[0, 1]`, recording every `every`-th step together with the first and
/// last states.
///
/// The initial sample is returned unchanged as the first record. Each
/// recorded state must keep the Herglotz sign pattern.
pub fn solve_pde(
    initial: &ContourSample,
    params: &JacobiParams,
    t_end: f64,
    h: f64,
    every: usize,
) -> Result<Vec<ContourSample>> {
    let (center, radius) = match initial.contour {
        Contour::Circle { center, radius, .. } => (center, radius),
        Contour::Segment { .. } => {
            return Err(Error::IllPosed(
                "time stepping on a segment has inflow at both ends; use a circle enclosing [0, 1]",
            ))
        }
    };
    if !(center - radius < 0.0 && center + radius > 1.0) {
        return Err(Error::InvalidInput("the circle must enclose [0, 1]"));
    }
    if !(h > 0.0 && t_end >= 0.0 && h.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidInput("need h > 0 and T >= 0"));
    }
    let steps_f = libm::round(t_end / h);
    if (steps_f * h - t_end).abs() > 1e-9 * t_end.max(h) {
        return Err(Error::InvalidInput("T must be an integer multiple of h"));
    }
    let steps = steps_f as usize;
    let mut out = alloc::vec![initial.clone()];
    if steps == 0 {
        return Ok(out);
    }
    let limit = 2.5;
    if h * spectral_radius_estimate(params, initial, radius) > limit {
        return Err(Error::InvalidInput("time step too large for the contour resolution"));
    }
    let z = initial.points.clone();
    let rhs = |g: &[Complex64]| -> Vec<Complex64> {
        let mut gp = g.to_vec();
        project(&mut gp);
        let d = spectral_derivative(&gp, &z, center);
        let mut r = rhs_pointwise(params, &z, &gp, &d);
        project(&mut r);
        r
    };
    let every = every.max(1);
    let mut g = initial.values.clone();
    let n = g.len();
    for step in 1..=steps {
        let k1 = rhs(&g);
        let tmp: Vec<Complex64> = (0..n).map(|i| g[i] + 0.5 * h * k1[i]).collect();
        let k2 = rhs(&tmp);
        let tmp: Vec<Complex64> = (0..n).map(|i| g[i] + 0.5 * h * k2[i]).collect();
        let k3 = rhs(&tmp);
        let tmp: Vec<Complex64> = (0..n).map(|i| g[i] + h * k3[i]).collect();
        let k4 = rhs(&tmp);
        for i in 0..n {
            g[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * h;
        if g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Integration {
                t,
                index: 0,
                what: "non-finite contour value",
            });
        }
        if step % every == 0 || step == steps {
            let s = ContourSample {
                contour: initial.contour,
                points: z.clone(),
                values: g.clone(),
                t,
            };
            if let Some(i) = s.herglotz_violation() {
                return Err(Error::Integration {
                    t,
                    index: i,
                    what: "Herglotz sign lost",
                });
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// `G(z) = Σ_n m_n z^{−n−1}` from a moment vector, for `|z| > 1`.
pub fn laurent_g(m: &[f64], z: Complex64) -> Complex64 {
    let q = 1.0 / z;
    let mut acc = Complex64::new(0.0, 0.0);
    for &mn in m.iter().rev() {
        acc = (acc + mn) * q;
    }
    acc
}

/// `h(u) = (1/u) G(1/u)`, with `h(0) = 1`.
pub fn h_from_g<G>(g: G, u: Complex64) -> Result<Complex64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if u == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let z = 1.0 / u;
    Ok(g(z)? * z)
}

/// `G(z) = (1/z) h(1/z)`.
pub fn g_from_h<H>(h: H, z: Complex64) -> Result<Complex64>
where
    H: Fn(Complex64) -> Result<Complex64>,
{
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain {
            op: "g_from_h",
            re: 0.0,
            im: 0.0,
        });
    }
    let u = 1.0 / z;
    Ok(h(u)? * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mass(c: f64) -> impl Fn(Complex64) -> Result<Complex64> {
        move |z| Ok(1.0 / (z - c))
    }

    #[test]
    fn short_segment_is_a_stencil_error() {
        assert!(matches!(Contour::segment(0.0, 1.0, 1.0, 4), Err(Error::Stencil { .. })));
    }

    #[test]
    fn fd4_is_fourth_order() {
        let c = Contour::segment_with_spacing(-1.0, 2.0, 1.0, 0.01).unwrap();
        let s = ContourSample::from_fn(c, 0.0, point_mass(0.3)).unwrap();
        let d = s.derivative().unwrap();
        for (z, dz) in s.points.iter().zip(&d) {
            let exact = -1.0 / ((z - 0.3) * (z - 0.3));
            assert!((dz - exact).norm() < 1e-7);
        }
    }

    #[test]
    fn circle_expansion_reproduces_point_mass() {
        let c = Contour::circle(0.5, 1.0, 128).unwrap();
        let s = ContourSample::from_fn(c, 0.0, point_mass(0.25)).unwrap();
        let b = s.laurent_coefficients().unwrap();
        // 1/(z − 0.25) = Σ (−0.25)^j (z − 0.5)^{−j−1}
        for (j, bj) in b.iter().take(20).enumerate() {
            assert!((bj - libm::pow(-0.25, j as f64)).norm() < 1e-13);
        }
        let z = Complex64::new(2.0, 1.0);
        assert!((s.evaluate(z).unwrap() - 1.0 / (z - 0.25)).norm() < 1e-14);
        assert!(s.evaluate(Complex64::new(0.5, 0.1)).is_err());
    }

    #[test]
    fn segment_time_stepping_is_refused() {
        let c = Contour::segment(-1.0, 2.0, 1.0, 64).unwrap();
        let s = ContourSample::from_fn(c, 0.0, point_mass(0.25)).unwrap();
        let p = JacobiParams::new(1.0, 0.5).unwrap();
        assert!(matches!(solve_pde(&s, &p, 1.0, 0.01, 1), Err(Error::IllPosed(_))));
    }

    #[test]
    fn zero_horizon_returns_initial() {
        let s = ContourSample::from_fn(Contour::default_circle(), 0.0, point_mass(0.25)).unwrap();
        let p = JacobiParams::new(1.0, 0.5).unwrap();
        let out = solve_pde(&s, &p, 0.0, 0.01, 1).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], s);
    }

    #[test]
    fn h_and_g_round_trip() {
        let g = point_mass(0.25);
        assert_eq!(h_from_g(&g, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let z = Complex64::new(1.7, -0.4);
        let back = g_from_h(|u| h_from_g(&g, u), z).unwrap();
        assert!((back - g(z).unwrap()).norm() < 1e-15);
    }
}
