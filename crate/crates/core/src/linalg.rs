//! Small dense symmetric eigenvalue problems and Hankel moment tests.

use alloc::vec::Vec;

/// Eigenvalues of a small real symmetric matrix given row-major, by cyclic
/// Jacobi rotations. Returned in increasing order.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m: Vec<f64> = a.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i].abs()).sum::<f64>().max(1e-300);
        if libm::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + libm::sqrt(1.0 + tau * tau));
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalues of the two Hausdorff–Hankel matrices built from
/// `m₀ … m₄`: `[m_{i+j}]` for `0 ≤ i, j ≤ 2` and `[m_{i+j+1} − m_{i+j+2}]`
/// for `0 ≤ i, j ≤ 1`. Both are nonnegative for moments of a law on
/// `[0, 1]`.
pub fn hankel_min_eigenvalues(m: &[f64]) -> (f64, f64) {
    assert!(m.len() >= 5, "need moments m0..m4");
    let mut h = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            h[i * 3 + j] = m[i + j];
        }
    }
    let mut k = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            k[i * 2 + j] = m[i + j + 1] - m[i + j + 2];
        }
    }
    (symmetric_eigenvalues(&h, 3)[0], symmetric_eigenvalues(&k, 2)[0])
}

/// `true` when both Hankel matrices of [`hankel_min_eigenvalues`] are
/// positive semidefinite up to `tol`.
pub fn hankel_positive(m: &[f64], tol: f64) -> bool {
    let (a, b) = hankel_min_eigenvalues(m);
    a >= -tol && b >= -tol
}
