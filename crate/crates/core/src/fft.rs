//! In-place radix-2 FFT for the spectral contour solver.

use num_complex::Complex64;

/// Forward transform `X_k = Σ_j x_j e^{−2πijk/n}` when `inverse` is false,
/// the unnormalized inverse otherwise. `x.len()` must be a power of two.
pub(crate) fn fft(x: &mut [Complex64], inverse: bool) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            x.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                // Twiddles from sin/cos directly keep the error at one
                // rounding per factor instead of accumulating along k.
                let w = Complex64::new(libm::cos(ang * k as f64), libm::sin(ang * k as f64));
                let a = x[start + k];
                let b = x[start + k + len / 2] * w;
                x[start + k] = a + b;
                x[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn matches_direct_dft() {
        let n = 16;
        let x: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(libm::sin(j as f64 * 0.7), libm::cos(j as f64 * 1.3)))
            .collect();
        let mut y = x.clone();
        fft(&mut y, false);
        for k in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let a = -2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64;
                s += xj * Complex64::new(libm::cos(a), libm::sin(a));
            }
            assert!((s - y[k]).norm() < 1e-12);
        }
        fft(&mut y, true);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / n as f64).norm() < 1e-14);
        }
    }
}
