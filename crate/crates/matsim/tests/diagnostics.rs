use free_jacobi_core::moments::{chebyshev_functional, integrate_moments};
use free_jacobi_core::JacobiParams;
use free_jacobi_matsim::stats::MAX_MARTINGALE_ORDER;
use free_jacobi_matsim::{
    convergence_study, martingale_diagnostic, simulate, MatrixJacobiConfig, MatrixStart, TrajectoryRecord,
};

/// `p = m`, `d = 2m`, identity-corner start, recorded every `0.1`.
fn arcsine_run(m: usize, horizon: f64, trials: usize, seed: u64) -> TrajectoryRecord {
    let mut cfg = MatrixJacobiConfig::new(m, m, 2 * m, 0.02, horizon, trials, seed);
    cfg.start = MatrixStart::IdentityCorner;
    cfg.record_every = 5;
    cfg.moment_order = 5;
    simulate(&cfg, 1).unwrap()
}

/// `e^{kt} c_k(t)` from the moment hierarchy started at `J₀ = P`.
fn oracle(k: usize, times: &[f64]) -> Vec<f64> {
    let params = JacobiParams::new(1.0, 0.5).unwrap();
    let traj = integrate_moments(&params, vec![1.0; 9], 2.0, 1e-3).unwrap();
    times
        .iter()
        .map(|&t| {
            let s = traj.iter().find(|s| (s.t - t).abs() < 1e-9).unwrap();
            (k as f64 * t).exp() * chebyshev_functional(&s.m, k).unwrap()
        })
        .collect()
}

#[test]
fn order_zero_is_identically_one() {
    let rec = arcsine_run(16, 1.0, 4, 1);
    for p in martingale_diagnostic(&rec, 0).unwrap() {
        assert!((p.ck_scaled - 1.0).abs() < 1e-12);
        assert_eq!(p.stderr_scaled, 0.0);
    }
}

#[test]
fn order_one_is_a_martingale_from_the_identity() {
    let rec = arcsine_run(32, 2.0, 20, 3);
    let series = martingale_diagnostic(&rec, 1).unwrap();
    assert!((series[0].ck_scaled - 1.0).abs() < 1e-12);
    for p in &series {
        let tol = 2.0 * p.stderr_scaled + 1.0 / 64.0;
        assert!((p.ck_scaled - 1.0).abs() <= tol, "t={}: {}", p.t, p.ck_scaled);
    }
}

#[test]
fn third_order_follows_the_moment_hierarchy() {
    let rec = arcsine_run(64, 2.0, 20, 5);
    let series = martingale_diagnostic(&rec, 3).unwrap();
    let want = oracle(3, &rec.times);
    for (p, w) in series.iter().zip(&want) {
        let bias = (3.0 * p.t).exp() / 128.0;
        let tol = 2.0 * p.stderr_scaled + bias;
        assert!((p.ck_scaled - w).abs() <= tol, "t={}: {} vs {w} (tol {tol})", p.t, p.ck_scaled);
    }
}

#[test]
#[ignore = "known red: the free oracle gives e^{3t}c_3 = 1 - 6t + 6t^2 from J0 = P"]
fn third_order_scaled_series_is_flat() {
    let rec = arcsine_run(128, 2.0, 8, 9);
    let series = martingale_diagnostic(&rec, 3).unwrap();
    let drift = series.iter().map(|p| (p.ck_scaled - series[0].ck_scaled).abs()).fold(0.0, f64::max);
    assert!(drift <= 0.05, "drift {drift}");
}

#[test]
fn diagnostic_preconditions() {
    let rec = arcsine_run(8, 0.2, 2, 1);
    assert!(martingale_diagnostic(&rec, MAX_MARTINGALE_ORDER + 1).is_err());
    assert!(martingale_diagnostic(&rec, 6).is_err());
    let mut cfg = rec.config.clone();
    cfg.p = 12;
    cfg.d = 24;
    let other = simulate(&cfg, 1).unwrap();
    assert!(martingale_diagnostic(&other, 1).is_err());
}

#[test]
fn distance_to_the_free_law_shrinks_with_dimension() {
    let base = MatrixJacobiConfig::new(16, 32, 64, 0.1, 0.0, 40, 77);
    let study = convergence_study(&base, &[64, 128, 256], 1).unwrap();
    for p in &study.points {
        eprintln!("d={} ks={:.5} m1_err={:.2e} m2_err={:.2e} (se {:.2e})", p.d, p.ks, p.m1_error, p.m2_error, p.m2_stderr);
    }
    eprintln!("fitted order {:.3}", study.ks_order);
    assert!(study.monotone);
    assert!(study.ks_order < -0.5, "order {}", study.ks_order);
}
