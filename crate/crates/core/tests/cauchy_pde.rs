use free_jacobi_core::cauchy::*;
use free_jacobi_core::moments::{initial_moments, integrate_moments_every, moment_rhs, Start};
use free_jacobi_core::stationary::{stationary_cauchy, stationary_moments};
use free_jacobi_core::{Complex64, Error, JacobiParams};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(l: f64, t: f64) -> JacobiParams {
    JacobiParams::new(l, t).unwrap()
}

#[test]
fn stationary_residual_on_the_segment() {
    for &(l, t) in &[(1.0, 0.5), (0.5, 0.5), (0.3, 0.6), (0.9, 0.1)] {
        let p = params(l, t);
        let contour = Contour::segment_with_spacing(-4.0, 6.0, 1.0, 0.01).unwrap();
        let s = ContourSample::from_fn(contour, 0.0, |z| stationary_cauchy(&p, z)).unwrap();
        assert!(s.herglotz_ok());
        let r = pde_rhs(&s, &p).unwrap();
        let worst = contour.trust_region().map(|i| r[i].norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-6, "({l},{t}) {worst:e}");
    }
}

#[test]
fn short_segments_are_refused() {
    assert!(matches!(Contour::segment(0.0, 1.0, 1.0, 4), Err(Error::Stencil { points: 4, .. })));
    let seg = Contour::segment(-1.0, 2.0, 1.0, 64).unwrap();
    let s = ContourSample::from_fn(seg, 0.0, |z| Ok(1.0 / (z - 0.25))).unwrap();
    assert!(matches!(solve_pde(&s, &params(1.0, 0.5), 1.0, 0.01, 1), Err(Error::IllPosed(_))));
}

#[test]
fn rhs_matches_the_moment_derivative_at_a_point() {
    let p = params(1.0, 0.5);
    let m0 = initial_moments(&p, &Start::Scalar(0.25), 40).unwrap();
    let dm = moment_rhs(&p, &m0);
    let z0 = c(2.0, 1.0);
    let oracle = laurent_g(&dm, z0);
    // A fine segment through z0 for the finite-difference derivative.
    let seg = Contour::segment_with_spacing(1.0, 3.0, 1.0, 1e-3).unwrap();
    let s = ContourSample::from_fn(seg, 0.0, |z| Ok(1.0 / (z - 0.25))).unwrap();
    let r = pde_rhs(&s, &p).unwrap();
    let j = s.points.iter().position(|z| (z - z0).norm() < 1e-9).unwrap();
    assert!((r[j] - oracle).norm() <= 1e-6, "{} vs {}", r[j], oracle);
}

#[test]
fn laurent_coefficients_of_the_rhs_match_the_hierarchy() {
    for &(l, t, c0) in &[(1.0, 0.5, 0.25), (0.5, 0.5, 0.6), (0.3, 0.2, 0.1)] {
        let p = params(l, t);
        let m0 = initial_moments(&p, &Start::Scalar(c0), 40).unwrap();
        let dm = moment_rhs(&p, &m0);
        let circle = Contour::circle(0.0, 4.0, 128).unwrap();
        let s = ContourSample::from_fn(circle, 0.0, |z| Ok(1.0 / (z - c0))).unwrap();
        let rhs = pde_rhs(&s, &p).unwrap();
        let rs = ContourSample {
            values: rhs,
            ..s.clone()
        };
        let b = rs.laurent_coefficients().unwrap();
        // Mass conservation: no z^{-1} term.
        assert!(b[0].norm() <= 1e-8);
        // Compare radius-scaled coefficients b_n / R^{n+1} up to order N − 2.
        for n in 0..=38 {
            let scale = 4f64.powi(n as i32 + 1);
            let err = (b[n] - dm[n]).norm() / scale;
            assert!(err <= 1e-8, "({l},{t}) n={n}: {err:e}");
        }
    }
}

#[test]
fn evolved_transform_matches_the_moment_oracle() {
    let p = params(1.0, 0.5);
    let h = 2.5e-3;
    let circle = Contour::default_circle();
    let s0 = ContourSample::from_fn(circle, 0.0, |z| Ok(1.0 / (z - 0.25))).unwrap();
    let traj = solve_pde(&s0, &p, 2.0, h, 20).unwrap();
    let m0 = initial_moments(&p, &Start::Scalar(0.25), 60).unwrap();
    let moments = integrate_moments_every(&p, m0, 2.0, h, 20).unwrap();
    assert_eq!(traj.len(), moments.len());
    let z0 = c(2.0, 1.0);
    let mut worst = 0.0f64;
    for (s, m) in traj.iter().zip(&moments) {
        assert!((s.t - m.t).abs() < 1e-12);
        assert!(s.herglotz_ok(), "t={}", s.t);
        let g = s.evaluate(z0).unwrap();
        worst = worst.max((g - laurent_g(&m.m, z0)).norm());
    }
    assert!(worst <= 5e-5, "{worst:e}");
}

#[test]
fn stationary_start_is_constant() {
    let p = params(0.5, 0.5);
    let s0 = ContourSample::from_fn(Contour::default_circle(), 0.0, |z| stationary_cauchy(&p, z)).unwrap();
    let traj = solve_pde(&s0, &p, 2.0, 2.5e-3, 100).unwrap();
    for s in &traj {
        for (a, b) in s.values.iter().zip(&s0.values) {
            assert!((a - b).norm() <= 1e-5);
        }
    }
    let m: Vec<f64> = stationary_moments(&p, 60).unwrap().into_iter().map(|s| s.value).collect();
    let z0 = c(2.0, 1.0);
    let g = traj.last().unwrap().evaluate(z0).unwrap();
    assert!((g - laurent_g(&m, z0)).norm() <= 1e-6);
}

#[test]
fn zero_horizon_echoes_the_initial_sample() {
    let p = params(0.5, 0.5);
    let s0 = ContourSample::from_fn(Contour::default_circle(), 0.0, |z| Ok(1.0 / (z - 0.3))).unwrap();
    let traj = solve_pde(&s0, &p, 0.0, 1e-2, 1).unwrap();
    assert_eq!(traj, vec![s0]);
}

#[test]
fn far_field_on_a_long_segment() {
    let p = params(0.5, 0.5);
    let seg = Contour::segment(-20.0, 20.0, 1.0, 401).unwrap();
    let s = ContourSample::from_fn(seg, 0.0, |z| stationary_cauchy(&p, z)).unwrap();
    assert!(s.far_field_ok());
}

#[test]
fn h_transform_examples() {
    let arcsine = params(1.0, 0.5);
    let g = |z: Complex64| stationary_cauchy(&arcsine, z);
    let h = h_from_g(g, c(0.5, 0.0)).unwrap();
    assert!((h - c(std::f64::consts::SQRT_2, 0.0)).norm() <= 1e-12);
    assert_eq!(h_from_g(g, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn h_round_trip(re in -3.0f64..4.0, im in 0.05f64..3.0) {
        let p = params(0.5, 0.5);
        let g = |z: Complex64| stationary_cauchy(&p, z);
        let z = c(re, im);
        let back = g_from_h(|u| h_from_g(g, u), z).unwrap();
        prop_assert!((back - g(z).unwrap()).norm() <= 1e-12 * (1.0 + g(z).unwrap().norm()));
    }

    #[test]
    fn herglotz_preserved_from_scalar_starts(c0 in 0.05f64..0.95, l in 0.2f64..1.0, t in 0.1f64..0.5) {
        let p = params(l, t);
        let s0 = ContourSample::from_fn(Contour::default_circle(), 0.0, |z| Ok(1.0 / (z - c0))).unwrap();
        let traj = solve_pde(&s0, &p, 2.0, 5e-3, 50).unwrap();
        prop_assert!(traj.iter().all(|s| s.herglotz_ok()));
    }
}
