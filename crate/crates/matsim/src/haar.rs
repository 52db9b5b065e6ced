//! Haar-distributed unitaries.

use faer::{c64, Mat};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{MatsimError, Result};

/// A `rows × cols` matrix of independent standard complex Gaussians,
/// `E|z|² = 1`, drawn row by row.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat<c64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut buf = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        buf.push(c64::new(s * re, s * im));
    }
    Mat::from_fn(rows, cols, |i, j| buf[i * cols + j])
}

/// Draws from Haar measure on `U(d)`.
///
/// A complex Gaussian matrix `Z = QR` is factored and each column of `Q` is
/// multiplied by the phase `r_jj/|r_jj|`, which makes the factorization
/// unique (positive diagonal in `R`) and the law of `Q` exactly Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Mat<c64>> {
    if d == 0 {
        return Err(MatsimError::InvalidConfig("Haar unitary needs d >= 1".into()));
    }
    for _ in 0..16 {
        let z = complex_gaussian_matrix(d, d, rng);
        let qr = z.qr();
        let r = qr.R();
        let phases: Vec<c64> = (0..d)
            .map(|j| {
                let v = r[(j, j)];
                let n = v.norm();
                if n > 1e-300 {
                    v / n
                } else {
                    c64::new(0.0, 0.0)
                }
            })
            .collect();
        if phases.iter().any(|p| p.norm() == 0.0) {
            continue;
        }
        let q = qr.compute_Q();
        return Ok(Mat::from_fn(d, d, |i, j| q[(i, j)] * phases[j]));
    }
    Err(MatsimError::RankDeficient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::unitarity_defect;
    use crate::trial_rng;

    #[test]
    fn haar_matrices_are_unitary() {
        let mut rng = trial_rng(7, 0);
        for d in [1, 2, 17, 64] {
            let u = sample_haar_unitary(d, &mut rng).unwrap();
            assert!(unitarity_defect(&u) <= 1e-12);
        }
        assert!(sample_haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn first_moment_vanishes() {
        let mut rng = trial_rng(11, 3);
        let d = 50;
        let mut acc = c64::new(0.0, 0.0);
        let n = 1000;
        for _ in 0..n {
            let u = sample_haar_unitary(d, &mut rng).unwrap();
            let tr: c64 = (0..d).map(|i| u[(i, i)]).sum();
            acc += tr / d as f64;
        }
        assert!((acc / n as f64).norm() <= 0.02);
    }
}
