//! Probability laws on `[0, 1]`: atoms at both endpoints plus a density
//! sampled on a grid inside `[lo, hi]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::quad::{Abscissa, EdgeRule};

/// Default number of density samples.
pub const DEFAULT_GRID: usize = 2048;

/// Edge-graded grids are built from this many panels per half interval, so
/// grid sizes must be multiples of twice this number.
pub const PANELS_PER_HALF: usize = 32;

/// Imaginary parts used by default in [`stieltjes_inversion`].
pub const DEFAULT_Y_LADDER: [f64; 4] = [1e-2, 3.162_277_660_168_379_5e-3, 1e-3, 3.162_277_660_168_379_5e-4];

const MASS_TOL: f64 = 1e-8;

/// Edge distance, as a fraction of the support width, below which
/// [`edge_adapted_ladder`] starts shrinking the default ladder.
pub const EDGE_LADDER_REACH: f64 = 0.2;

/// The default ladder scaled by `min(1, d / (EDGE_LADDER_REACH·(hi−lo)))`,
/// where `d` is the distance from `x` to the nearer of `lo`, `hi`.
///
/// Near a square-root edge at distance `d` the leftover Richardson error
/// behaves like `y₁y₂/d²`, so a fixed ladder loses accuracy as `d` shrinks.
/// Scaling every rung with `d` keeps that ratio bounded.
pub fn edge_adapted_ladder(x: f64, lo: f64, hi: f64) -> [f64; 4] {
    let width = hi - lo;
    let d = (x - lo).min(hi - x);
    let s = if width > 0.0 && d > 0.0 {
        (d / (EDGE_LADDER_REACH * width)).min(1.0)
    } else {
        1.0
    };
    let mut out = DEFAULT_Y_LADDER;
    for y in &mut out {
        *y *= s;
    }
    out
}


#[derive(Clone, Debug)]
enum Layout {
    /// Nodes of an [`EdgeRule`]; weights are its quadrature weights.
    Graded(EdgeRule),
    /// Any other strictly increasing grid, integrated by the trapezoid
    /// rule and interpolated linearly.
    Trapezoid,
    /// No continuous part.
    Empty,
}

/// A law `atom0·δ₀ + atom1·δ₁ + g(x) dx` with `g` supported in `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    atom0: f64,
    atom1: f64,
    lo: f64,
    hi: f64,
    grid: Vec<f64>,
    density: Vec<f64>,
    weights: Vec<f64>,
    layout: Layout,
}

fn check_atoms(atom0: f64, atom1: f64) -> Result<()> {
    let ok = |a: f64| a.is_finite() && (0.0..=1.0).contains(&a);
    if ok(atom0) && ok(atom1) {
        Ok(())
    } else {
        Err(Error::InvalidInput("atoms must lie in [0, 1]"))
    }
}

fn check_support(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("support must satisfy 0 <= lo < hi <= 1"))
    }
}

fn graded_rule(lo: f64, hi: f64, n: usize) -> Result<EdgeRule> {
    let per = 2 * PANELS_PER_HALF;
    if n < per || n % per != 0 {
        return Err(Error::InvalidInput("grid size must be a positive multiple of 64"));
    }
    EdgeRule::new(lo, hi, PANELS_PER_HALF, n / per)
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

impl SpectralMeasure {
    /// Samples `density` on the edge-graded grid of `n` points in `[lo, hi]`.
    /// `n` must be a multiple of 64; see [`DEFAULT_GRID`].
    pub fn from_density<F: FnMut(f64) -> Result<f64>>(
        atom0: f64,
        atom1: f64,
        lo: f64,
        hi: f64,
        n: usize,
        mut density: F,
    ) -> Result<Self> {
        Self::from_density_edge(atom0, atom1, lo, hi, n, |a| density(a.x))
    }

    /// Like [`SpectralMeasure::from_density`], with the density receiving
    /// the grid abscissa together with its distances to `lo` and `hi`.
    pub fn from_density_edge<F: FnMut(Abscissa) -> Result<f64>>(
        atom0: f64,
        atom1: f64,
        lo: f64,
        hi: f64,
        n: usize,
        mut density: F,
    ) -> Result<Self> {
        check_atoms(atom0, atom1)?;
        check_support(lo, hi)?;
        let rule = graded_rule(lo, hi, n)?;
        let grid: Vec<f64> = rule.nodes().iter().map(|a| a.x).collect();
        let values = rule.nodes().iter().map(|&a| density(a)).collect::<Result<Vec<f64>>>()?;
        let weights = rule.weights().to_vec();
        Self::assemble(atom0, atom1, lo, hi, grid, values, weights, Layout::Graded(rule))
    }

    /// Builds a measure from stored samples. A grid that coincides with the
    /// edge-graded grid of the same size keeps its Gauss weights; any other
    /// strictly increasing grid is integrated with the trapezoid rule.
    pub fn from_samples(
        atom0: f64,
        atom1: f64,
        lo: f64,
        hi: f64,
        grid: Vec<f64>,
        density: Vec<f64>,
    ) -> Result<Self> {
        check_atoms(atom0, atom1)?;
        check_support(lo, hi)?;
        if grid.len() != density.len() {
            return Err(Error::InvalidInput("grid and density lengths differ"));
        }
        if grid.is_empty() {
            return Self::assemble(atom0, atom1, lo, hi, grid, density, Vec::new(), Layout::Empty);
        }
        if let Ok(rule) = graded_rule(lo, hi, grid.len()) {
            let same = rule
                .nodes()
                .iter()
                .zip(&grid)
                .all(|(a, &x)| (a.x - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300));
            if same {
                let weights = rule.weights().to_vec();
                return Self::assemble(atom0, atom1, lo, hi, grid, density, weights, Layout::Graded(rule));
            }
        }
        let weights = trapezoid_weights(&grid);
        Self::assemble(atom0, atom1, lo, hi, grid, density, weights, Layout::Trapezoid)
    }

    /// Purely atomic law on `{0, 1}`.
    pub fn atomic(atom0: f64, atom1: f64) -> Result<Self> {
        Self::from_samples(atom0, atom1, 0.0, 1.0, Vec::new(), Vec::new())
    }

    /// Arcsine law `1/(π√(x(1−x)))` on `[0, 1]`.
    pub fn arcsine(n: usize) -> Result<Self> {
        Self::from_density(0.0, 0.0, 0.0, 1.0, n, |x| Ok(1.0 / (PI * libm::sqrt(x * (1.0 - x)))))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        atom0: f64,
        atom1: f64,
        lo: f64,
        hi: f64,
        grid: Vec<f64>,
        density: Vec<f64>,
        weights: Vec<f64>,
        layout: Layout,
    ) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("grid must be strictly increasing"));
        }
        if let (Some(&first), Some(&last)) = (grid.first(), grid.last()) {
            if first < lo || last > hi {
                return Err(Error::InvalidInput("grid must lie inside [lo, hi]"));
            }
        }
        for (&x, &g) in grid.iter().zip(&density) {
            if !g.is_finite() {
                return Err(Error::NonFinite {
                    op: "density sample",
                    abscissa: x,
                });
            }
            if g < 0.0 {
                return Err(Error::NegativeDensity { x, value: g });
            }
        }
        let mu = Self {
            atom0,
            atom1,
            lo,
            hi,
            grid,
            density,
            weights,
            layout,
        };
        let mass = mu.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::Normalization { mass });
        }
        Ok(mu)
    }

    pub fn atom0(&self) -> f64 {
        self.atom0
    }

    pub fn atom1(&self) -> f64 {
        self.atom1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Quadrature weights attached to the grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether the grid carries Gauss weights of the edge-graded rule.
    pub fn is_graded(&self) -> bool {
        matches!(self.layout, Layout::Graded(_))
    }

    /// Mass of the absolutely continuous part.
    pub fn continuous_mass(&self) -> f64 {
        self.weights.iter().zip(&self.density).map(|(w, g)| w * g).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atom0 + self.atom1 + self.continuous_mass()
    }

    /// `∫ f dμ`, with the continuous part integrated by the grid weights.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut s = 0.0;
        if self.atom0 > 0.0 {
            s += self.atom0 * f(0.0);
        }
        if self.atom1 > 0.0 {
            s += self.atom1 * f(1.0);
        }
        s + self
            .grid
            .iter()
            .zip(&self.weights)
            .zip(&self.density)
            .map(|((&x, w), g)| w * g * f(x))
            .sum::<f64>()
    }

    /// Density value and slope at `x` interpolated from the samples.
    fn interpolate(&self, x: f64) -> (f64, f64) {
        match &self.layout {
            Layout::Graded(rule) => rule.interpolate(&self.density, x),
            Layout::Trapezoid => {
                let g = &self.grid;
                let i = g.partition_point(|&v| v <= x).clamp(1, g.len() - 1);
                let slope = (self.density[i] - self.density[i - 1]) / (g[i] - g[i - 1]);
                (self.density[i - 1] + slope * (x - g[i - 1]), slope)
            }
            Layout::Empty => (0.0, 0.0),
        }
    }

    /// Nonnegativity of the Hausdorff–Hankel matrices of `m₀ … m₅` within
    /// `tol`.
    pub fn hausdorff_ok(&self, tol: f64) -> bool {
        linalg::hankel_positive(&moments_of_measure(self, 5), tol)
    }
}

/// `m₀ … m_N` with `m_n = atom1 + ∫ xⁿ g(x) dx` for `n ≥ 1` and `m₀` the
/// total mass.
pub fn moments_of_measure(mu: &SpectralMeasure, n: usize) -> Vec<f64> {
    let mut m = alloc::vec![0.0; n + 1];
    m[0] = mu.total_mass();
    if n == 0 {
        return m;
    }
    let mut pw: Vec<f64> = mu.weights.iter().zip(&mu.density).map(|(w, g)| w * g).collect();
    for slot in m.iter_mut().skip(1) {
        let mut s = mu.atom1;
        for (p, &x) in pw.iter_mut().zip(&mu.grid) {
            *p *= x;
            s += *p;
        }
        *slot = s;
    }
    m
}

/// `G(z) = atom0/z + atom1/(z−1) + ∫ g(x)/(z−x) dx`.
///
/// For `z` above or below the support the integrand is nearly singular, so
/// the linear Taylor part of `g` at `Re z` is subtracted and integrated in
/// closed form.
pub fn cauchy_of_measure(mu: &SpectralMeasure, z: Complex64) -> Result<Complex64> {
    let on_support = !mu.grid.is_empty() && z.re >= mu.lo && z.re <= mu.hi;
    if !(z.re.is_finite() && z.im.is_finite())
        || (z.im == 0.0 && (on_support || z.re == 0.0 || z.re == 1.0))
    {
        return Err(Error::Domain {
            op: "cauchy_of_measure",
            re: z.re,
            im: z.im,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    if mu.atom0 > 0.0 {
        g += mu.atom0 / z;
    }
    if mu.atom1 > 0.0 {
        g += mu.atom1 / (z - one);
    }
    if mu.grid.is_empty() {
        return Ok(g);
    }
    let (a, b) = (mu.grid[0], mu.grid[mu.grid.len() - 1]);
    let (a, b) = match mu.layout {
        Layout::Graded(_) => (mu.lo, mu.hi),
        _ => (a, b),
    };
    if z.re > a && z.re < b {
        let x0 = z.re;
        let (g0, d0) = mu.interpolate(x0);
        let log_ratio = ((z - a) / (z - b)).ln();
        let mut acc = g0 * log_ratio + d0 * ((z - x0) * log_ratio - (b - a));
        for ((&x, &w), &gx) in mu.grid.iter().zip(&mu.weights).zip(&mu.density) {
            let rem = gx - g0 - d0 * (x - x0);
            acc += w * rem / (z - x);
        }
        g += acc;
    } else {
        for ((&x, &w), &gx) in mu.grid.iter().zip(&mu.weights).zip(&mu.density) {
            g += w * gx / (z - x);
        }
    }
    Ok(g)
}

/// Output of [`stieltjes_inversion`].
#[derive(Clone, Debug, PartialEq)]
pub struct Inversion {
    /// Extrapolated density clipped at zero.
    pub density: Vec<f64>,
    /// Extrapolated value before clipping.
    pub raw: Vec<f64>,
    /// Points where the Richardson estimates did not settle.
    pub flagged: Vec<bool>,
}

/// Recovers a density from a Cauchy transform through
/// `g(x) = lim_{y→0⁺} −Im G(x+iy)/π`.
///
/// The values along `y_ladder` (strictly decreasing) are combined pairwise
/// by Richardson extrapolation, assuming an error linear in `y`; the last
/// combination is returned. A point whose successive extrapolants disagree
/// by more than `1e-4` absolute plus `1e-3` relative is flagged rather
/// than treated as failure. An unflagged estimate below `-1e-6` indicates
/// a non-Herglotz input and is an error.
pub fn stieltjes_inversion<G>(g: G, x_grid: &[f64], y_ladder: &[f64]) -> Result<Inversion>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if y_ladder.len() < 2 {
        return Err(Error::InvalidInput("y ladder needs at least two values"));
    }
    if y_ladder.windows(2).any(|w| !(w[0] > w[1])) || y_ladder[y_ladder.len() - 1] <= 0.0 {
        return Err(Error::InvalidInput("y ladder must be positive and strictly decreasing"));
    }
    let mut out = Inversion {
        density: Vec::with_capacity(x_grid.len()),
        raw: Vec::with_capacity(x_grid.len()),
        flagged: Vec::with_capacity(x_grid.len()),
    };
    let mut vals = Vec::with_capacity(y_ladder.len());
    for &x in x_grid {
        vals.clear();
        for &y in y_ladder {
            let gz = g(Complex64::new(x, y))?;
            vals.push(-gz.im / PI);
        }
        let rich: Vec<f64> = (1..vals.len())
            .map(|i| {
                let q = y_ladder[i] / y_ladder[i - 1];
                (vals[i] - q * vals[i - 1]) / (1.0 - q)
            })
            .collect();
        let est = rich[rich.len() - 1];
        let flagged = rich.len() >= 2 && {
            let prev = rich[rich.len() - 2];
            (est - prev).abs() > 1e-4 + 1e-3 * est.abs()
        };
        if !est.is_finite() {
            return Err(Error::NonFinite {
                op: "stieltjes_inversion",
                abscissa: x,
            });
        }
        if est < -1e-6 && !flagged {
            return Err(Error::NegativeDensity { x, value: est });
        }
        out.density.push(est.max(0.0));
        out.raw.push(est);
        out.flagged.push(flagged);
    }
    Ok(out)
}

/// [`stieltjes_inversion`] with [`edge_adapted_ladder`] chosen separately
/// for every abscissa, relative to the support `[lo, hi]`.
pub fn stieltjes_inversion_adapted<G>(g: G, x_grid: &[f64], lo: f64, hi: f64) -> Result<Inversion>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = Inversion {
        density: Vec::with_capacity(x_grid.len()),
        raw: Vec::with_capacity(x_grid.len()),
        flagged: Vec::with_capacity(x_grid.len()),
    };
    for &x in x_grid {
        let one = stieltjes_inversion(&g, &[x], &edge_adapted_ladder(x, lo, hi))?;
        out.density.push(one.density[0]);
        out.raw.push(one.raw[0]);
        out.flagged.push(one.flagged[0]);
    }
    Ok(out)
}
