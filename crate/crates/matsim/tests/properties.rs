use faer::{c64, Mat};
use free_jacobi_matsim::brownian::{hermitian_increment, unitarity_defect, unitary_bm_step};
use free_jacobi_matsim::corner::{corner_eigenvalues, spectral_moments};
use free_jacobi_matsim::haar::sample_haar_unitary;
use free_jacobi_matsim::{ks_distance, simulate, trial_rng, MatrixJacobiConfig, MatrixStart, Scheme};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..=12).prop_flat_map(|d| (1..=d).prop_flat_map(move |p| (1..=p).prop_map(move |m| (m, p, d))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moments_of_a_spectrum_in_the_unit_interval_decrease(eig in prop::collection::vec(0.0f64..=1.0, 1..40)) {
        let m = spectral_moments(&eig, 8);
        prop_assert_eq!(m[0], 1.0);
        for n in 1..=8 {
            prop_assert!(m[n] >= 0.0 && m[n] <= m[n - 1] + 1e-15);
        }
        // Cauchy–Schwarz on the spectral measure.
        prop_assert!(m[1] * m[1] <= m[2] + 1e-15);
    }

    #[test]
    fn corner_of_a_unitary_has_spectrum_in_the_unit_interval((m, p, d) in shape(), seed in any::<u64>(), h in 0.0f64..2.0) {
        let mut rng = trial_rng(seed, 0);
        let y = sample_haar_unitary(d, &mut rng).unwrap();
        prop_assert!(unitarity_defect(&y) <= 1e-12);
        let dx = hermitian_increment(d, h, &mut rng);
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(dx[(i, j)], dx[(j, i)].conj());
            }
        }
        let y = unitary_bm_step(&y, &dx).unwrap();
        prop_assert!(unitarity_defect(&y) <= 1e-12);
        let eig = corner_eigenvalues(&y, m, p).unwrap();
        prop_assert_eq!(eig.len(), m);
        prop_assert!(eig.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(eig.windows(2).all(|w| w[0] <= w[1]));
        // The full corner (p = d) is the identity.
        let full = corner_eigenvalues(&y, m, d).unwrap();
        prop_assert!(full.iter().all(|&v| (v - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn ks_distance_is_a_sup_gap(samples in prop::collection::vec(0.0f64..1.0, 1..60)) {
        let ks = ks_distance(&samples, |x| Ok(x.clamp(0.0, 1.0))).unwrap();
        prop_assert!(ks >= 0.5 / samples.len() as f64 - 1e-15 && ks <= 1.0);
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let brute = sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / sorted.len() as f64).max((i + 1) as f64 / sorted.len() as f64 - x))
            .fold(0.0, f64::max);
        prop_assert!((ks - brute).abs() <= 1e-15);
    }

    #[test]
    fn simulated_moments_are_bounded_and_seeded((m, p, d) in shape(), seed in any::<u64>(), direct in any::<bool>()) {
        prop_assume!(!(direct && p == d));
        let mut cfg = MatrixJacobiConfig::new(m, p, d, 0.1, 0.3, 3, seed);
        cfg.start = MatrixStart::IdentityCorner;
        cfg.scheme = if direct { Scheme::DirectSde } else { Scheme::UnitaryCorner };
        let a = simulate(&cfg, 1).unwrap();
        let b = simulate(&cfg, 2).unwrap();
        prop_assert_eq!(&a.mean_moments, &b.mean_moments);
        for row in &a.mean_moments {
            prop_assert_eq!(row[0], 1.0);
            prop_assert!(row.windows(2).all(|w| w[1] >= 0.0 && w[1] <= w[0] + 1e-12));
        }
    }
}

#[test]
fn identity_step_with_zero_noise_leaves_the_corner_alone() {
    let y = Mat::<c64>::identity(6, 6);
    let y = unitary_bm_step(&y, &Mat::zeros(6, 6)).unwrap();
    assert_eq!(corner_eigenvalues(&y, 2, 3).unwrap(), vec![1.0, 1.0]);
}
