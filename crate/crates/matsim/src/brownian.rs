//! Unitary Brownian motion on `U(d)` by geometric steps.

use faer::{c64, Mat, MatRef, Side};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{MatsimError, Result};

/// Unitarity drift above which a state is re-projected onto `U(d)`.
pub const UNITARITY_TOL: f64 = 1e-8;

/// A GUE increment with `E|ΔX_jk|² = h/d`, so `E tr_d(ΔX²) = h`.
///
/// The diagonal is real Gaussian with variance `h/d`; each off-diagonal
/// pair is one complex Gaussian and its conjugate.
pub fn hermitian_increment<R: Rng + ?Sized>(d: usize, h: f64, rng: &mut R) -> Mat<c64> {
    let s = (h / d as f64).sqrt();
    let off = s * std::f64::consts::FRAC_1_SQRT_2;
    let mut upper = vec![c64::new(0.0, 0.0); d * d];
    for i in 0..d {
        let g: f64 = rng.sample(StandardNormal);
        upper[i * d + i] = c64::new(s * g, 0.0);
        for j in i + 1..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            upper[i * d + j] = c64::new(off * re, off * im);
        }
    }
    Mat::from_fn(d, d, |i, j| if i <= j { upper[i * d + j] } else { upper[j * d + i].conj() })
}

/// `exp(iX)` for Hermitian `X`, through its eigendecomposition.
pub fn exp_i_hermitian(x: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let e = x
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| MatsimError::Eigen(format!("{err:?}")))?;
    let u = e.U();
    let s = e.S();
    let n = x.nrows();
    let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * c64::cis(s[j].re));
    Ok(scaled.as_ref() * u.adjoint())
}

/// `Y ← exp(iΔX) Y`.
///
/// Under the increment normalization `E[exp(iΔX)] = (1 − h/2)I + O(h²)`,
/// which reproduces the `−½Y dt` drift of `dY = i dX Y − ½Y dt`.
pub fn unitary_bm_step(y: &Mat<c64>, dx: &Mat<c64>) -> Result<Mat<c64>> {
    if y.nrows() != dx.nrows() || y.ncols() != dx.ncols() {
        return Err(MatsimError::InvalidConfig("increment and state dimensions differ".into()));
    }
    Ok(exp_i_hermitian(dx.as_ref())? * y)
}

/// `max |(Y*Y − I)_jk|`.
pub fn unitarity_defect(y: &Mat<c64>) -> f64 {
    let g = y.adjoint() * y;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Nearest unitary `WV*` from the SVD `Y = WΣV*`.
pub fn polar_projection(y: &Mat<c64>) -> Result<Mat<c64>> {
    let svd = y.svd().map_err(|err| MatsimError::Eigen(format!("{err:?}")))?;
    Ok(svd.U() * svd.V().adjoint())
}

/// `tr_d(Yᵏ)` for `k = 1, 2`.
pub fn normalized_traces(y: &Mat<c64>) -> (c64, c64) {
    let d = y.nrows();
    let t1: c64 = (0..d).map(|i| y[(i, i)]).sum();
    let mut t2 = c64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            t2 += y[(i, k)] * y[(k, i)];
        }
    }
    (t1 / d as f64, t2 / d as f64)
}
