//! End-to-end checks: threshold bisection, gap table machinery, and the
//! tomography round trip.

use qcorr::hierarchy::{optimal_q, optimal_q_analytic, threshold, threshold_gap, Measure};
use qcorr::linalg::fidelity;
use qcorr::states::{gws, werner, GwsParams};
use qcorr::tomography::{fit_pq, mle_reconstruct, simulate_counts};

#[test]
fn thresholds_at_q_tenth() {
    let q = 0.1f64;
    let tol = 1e-4;
    let p_n = threshold(Measure::Negativity, q, tol).unwrap();
    let p_b = threshold(Measure::Bell, q, tol).unwrap();
    let p_s3 = threshold(Measure::S3, q, tol).unwrap();
    let p_s2 = threshold(Measure::S2, q, tol).unwrap();
    assert!((p_n - 5.0 / 11.0).abs() < 1e-12, "p_n = {p_n}");
    assert!((p_b - 1.0 / 1.36f64.sqrt()).abs() < 1e-12, "p_b = {p_b}");
    assert!((p_s3 - 0.7390).abs() < 1e-3, "p_s3 = {p_s3}");
    assert!((p_s2 - 0.8370).abs() < 1e-3, "p_s2 = {p_s2}");
}

#[test]
fn werner_thresholds() {
    let tol = 1e-4;
    let p_s3 = threshold(Measure::S3, 0.5, tol).unwrap();
    let p_s2 = threshold(Measure::S2, 0.5, tol).unwrap();
    assert!((p_s3 - 1.0 / 3f64.sqrt()).abs() < 2e-4, "p_s3 = {p_s3}");
    assert!((p_s2 - 1.0 / 2f64.sqrt()).abs() < 2e-4, "p_s2 = {p_s2}");
}

#[test]
fn bell_to_negativity_gap() {
    let d = threshold_gap(Measure::Bell, Measure::Negativity, 0.1f64, 1e-4).unwrap();
    assert!((d - 0.4029).abs() < 1e-3, "gap = {d}");
}

#[test]
fn analytic_optimum_location() {
    let q: f64 = optimal_q_analytic();
    assert!((q - 0.1171).abs() < 5e-4, "q = {q}");
    let x = (q * (1.0 - q)).sqrt();
    let residual = (1.0 + 4.0 * x * x).powi(3) - x * x * (1.0 + 4.0 * x).powi(4);
    assert!(residual.abs() < 1e-10, "residual = {residual}");
}

#[test]
fn scanned_optimum_matches_analytic() {
    let best = optimal_q::<f64>(Measure::Bell, Measure::Negativity, 1e-4).unwrap();
    assert!((best.q - 0.1171).abs() < 2e-3, "q = {}", best.q);
    assert!((best.gap - 0.4037).abs() < 1e-3, "gap = {}", best.gap);
}

#[test]
fn tomography_round_trip() {
    let rho = gws(GwsParams::new(0.8f64, 0.1).unwrap());
    let counts = simulate_counts(&rho, 1e5, 7).unwrap();
    let rec = mle_reconstruct(&counts, 500, 1e-10).unwrap();
    let fid = fidelity(&rec, &rho).unwrap();
    assert!(fid >= 0.999, "fidelity = {fid}");
    let fit = fit_pq(&rec).unwrap();
    assert!((fit.p - 0.8).abs() <= 0.03, "p_est = {}", fit.p);
    assert!((fit.q - 0.1).abs() <= 0.03, "q_est = {}", fit.q);
}

#[test]
fn tomography_determinism() {
    let rho = werner(0.7).unwrap();
    let a = simulate_counts(&rho, 1e4, 42).unwrap();
    let b = simulate_counts(&rho, 1e4, 42).unwrap();
    assert_eq!(a.counts, b.counts);
    let c = simulate_counts(&rho, 1e4, 43).unwrap();
    assert_ne!(a.counts, c.counts);
}
