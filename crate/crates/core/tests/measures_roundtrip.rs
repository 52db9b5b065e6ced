use core::f64::consts::PI;

use free_jacobi_core::measures::*;
use free_jacobi_core::stationary::stationary_measure;
use free_jacobi_core::{Complex64, JacobiParams};
use proptest::prelude::*;

fn measures() -> Vec<SpectralMeasure> {
    let mut v = vec![
        SpectralMeasure::arcsine(DEFAULT_GRID).unwrap(),
        SpectralMeasure::atomic(0.3, 0.7).unwrap(),
    ];
    for &(l, t) in &[(0.5, 0.5), (2.0, 0.25), (1.0, 0.9), (0.2, 0.6)] {
        v.push(stationary_measure(&JacobiParams::new(l, t).unwrap(), DEFAULT_GRID).unwrap());
    }
    // A semicircle on [0.2, 0.6] with atoms.
    let sc = |x: f64| 0.5 * 8.0 / (PI * 0.16) * ((x - 0.2) * (0.6 - x)).max(0.0).sqrt();
    v.push(SpectralMeasure::from_density(0.25, 0.25, 0.2, 0.6, 1024, |x| Ok(sc(x))).unwrap());
    v
}

#[test]
fn every_constructed_measure_is_normalized_and_hausdorff() {
    for mu in measures() {
        let m = moments_of_measure(&mu, 8);
        assert!((m[0] - 1.0).abs() <= 1e-8);
        assert!(m.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(mu.hausdorff_ok(1e-9));
    }
}

#[test]
fn far_field_normalization() {
    for mu in measures() {
        for z in [Complex64::new(1e6, 0.0), Complex64::new(0.0, 1e6), Complex64::new(-7e5, 7e5)] {
            let g = cauchy_of_measure(&mu, z).unwrap();
            assert!((z * g - 1.0).norm() <= 2e-6);
        }
    }
}

/// Grid points whose distance to both support ends is at least `k` mean
/// spacings, thinned.
fn interior(mu: &SpectralMeasure, k: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = mu.support();
    let sp = (hi - lo) / mu.grid().len() as f64;
    mu.grid()
        .iter()
        .zip(mu.density())
        .filter(|(&x, _)| (x - lo).min(hi - x) >= k * sp)
        .step_by(5)
        .map(|(&x, &g)| (x, g))
        .collect()
}

#[test]
fn round_trip_recovers_the_density() {
    for mu in measures() {
        if mu.grid().len() < 8 {
            continue;
        }
        let (lo, hi) = mu.support();
        let pts = interior(&mu, 2.0);
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let inv = stieltjes_inversion_adapted(|z| cauchy_of_measure(&mu, z), &xs, lo, hi).unwrap();
        for (i, &(x, want)) in pts.iter().enumerate() {
            let got = inv.density[i];
            assert!((got - want).abs() <= 1e-4, "x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn default_ladder_round_trip_away_from_edges() {
    for mu in measures() {
        if mu.grid().len() < 8 {
            continue;
        }
        let pts = interior(&mu, 205.0);
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let inv = stieltjes_inversion(|z| cauchy_of_measure(&mu, z), &xs, &DEFAULT_Y_LADDER).unwrap();
        for (i, &(x, want)) in pts.iter().enumerate() {
            let got = inv.density[i];
            assert!((got - want).abs() <= 1e-4, "x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn adapted_ladder_shrinks_only_near_edges() {
    assert_eq!(edge_adapted_ladder(0.5, 0.0, 1.0), DEFAULT_Y_LADDER);
    let near = edge_adapted_ladder(0.01, 0.0, 1.0);
    for (a, b) in near.iter().zip(DEFAULT_Y_LADDER) {
        assert!((a / b - 0.05).abs() < 1e-12);
    }
}

#[test]
fn loaded_samples_keep_gauss_weights_or_fall_back() {
    let mu = SpectralMeasure::arcsine(256).unwrap();
    let again = SpectralMeasure::from_samples(0.0, 0.0, 0.0, 1.0, mu.grid().to_vec(), mu.density().to_vec()).unwrap();
    assert!(again.is_graded());
    let xs: Vec<f64> = (0..=20000).map(|i| i as f64 / 20000.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 6.0 * x * (1.0 - x)).collect();
    let tr = SpectralMeasure::from_samples(0.0, 0.0, 0.0, 1.0, xs, ys).unwrap();
    assert!(!tr.is_graded());
    let inv = stieltjes_inversion(|z| cauchy_of_measure(&tr, z), &[0.5], &DEFAULT_Y_LADDER).unwrap();
    assert!((inv.density[0] - 1.5).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn herglotz_in_the_upper_half_plane(idx in 0usize..7, pts in prop::collection::vec((-2.0f64..3.0, 1e-6f64..4.0), 100)) {
        let mu = &measures()[idx];
        for (x, y) in pts {
            let g = cauchy_of_measure(mu, Complex64::new(x, y)).unwrap();
            prop_assert!(g.im < 0.0, "Im G({x}+{y}i) = {}", g.im);
        }
    }
}
