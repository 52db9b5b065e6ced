//! The compressed process `J = XX*` with `X` the top-left `m × p` block.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{MatsimError, Result};

/// Allowed excursion of a corner spectrum outside `[0, 1]`.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// `J = XX*` for the top-left `m × p` block `X` of `Y`, after checking that
/// its spectrum lies in `[0, 1]` up to [`SPECTRUM_TOL`].
pub fn corner_jacobi(y: &Mat<c64>, m: usize, p: usize) -> Result<Mat<c64>> {
    let (j, _) = corner_with_spectrum(y, m, p)?;
    Ok(j)
}

/// Sorted corner eigenvalues, checked and clamped into `[0, 1]`.
pub fn corner_eigenvalues(y: &Mat<c64>, m: usize, p: usize) -> Result<Vec<f64>> {
    Ok(corner_with_spectrum(y, m, p)?.1)
}

fn corner_with_spectrum(y: &Mat<c64>, m: usize, p: usize) -> Result<(Mat<c64>, Vec<f64>)> {
    let d = y.nrows();
    if !(1 <= m && m <= p && p <= d && y.ncols() == d) {
        return Err(MatsimError::InvalidConfig(format!(
            "corner needs 1 <= m <= p <= d, got m={m}, p={p}, d={d}"
        )));
    }
    let x = y.as_ref().submatrix(0, 0, m, p);
    let j = x * x.adjoint();
    let mut eig = hermitian_eigenvalues(j.as_ref())?;
    let excess = spectrum_excess(&eig);
    if excess > SPECTRUM_TOL {
        return Err(MatsimError::Spectrum { excess });
    }
    for v in &mut eig {
        *v = v.clamp(0.0, 1.0);
    }
    Ok((j, eig))
}

/// How far a spectrum reaches outside `[0, 1]`.
pub fn spectrum_excess(eig: &[f64]) -> f64 {
    eig.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max)
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle read).
pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|err| MatsimError::Eigen(format!("{err:?}")))
}

/// `[1, tr_m J, …, tr_m Jᴺ]` from eigenvalues.
pub fn spectral_moments(eig: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    out[0] = 1.0;
    for &v in eig {
        let mut pw = 1.0;
        for slot in out.iter_mut().skip(1) {
            pw *= v;
            *slot += pw;
        }
    }
    let m = eig.len() as f64;
    for slot in out.iter_mut().skip(1) {
        *slot /= m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_corner_is_the_identity() {
        let y = Mat::<c64>::identity(10, 10);
        let j = corner_jacobi(&y, 3, 5).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((j[(i, k)] - c64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let m = spectral_moments(&corner_eigenvalues(&y, 3, 5).unwrap(), 4);
        assert!(m.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn bad_shapes_and_broken_unitaries_are_refused() {
        let y = Mat::<c64>::identity(4, 4);
        assert!(corner_jacobi(&y, 3, 2).is_err());
        assert!(corner_jacobi(&y, 2, 5).is_err());
        let scaled = Mat::from_fn(4, 4, |i, j| if i == j { c64::new(1.1, 0.0) } else { c64::new(0.0, 0.0) });
        assert!(matches!(corner_jacobi(&scaled, 2, 3), Err(MatsimError::Spectrum { .. })));
    }
}
