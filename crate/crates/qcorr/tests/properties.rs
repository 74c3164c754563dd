//! Randomized invariants for the state constructors, measures, and linear
//! algebra. Each property samples either `(p, q)` parameters directly or a
//! seed for the crate's deterministic generators.

use num_complex::Complex;
use proptest::prelude::*;
use qcorr::entanglement::{gws_negativity, negativity, negativity_threshold};
use qcorr::hierarchy::{classify_values, Cutoffs};
use qcorr::linalg::{
    eig_hermitian, fidelity, partial_trace, partial_transpose, ComplexMatrix, DensityMatrix,
    Subsystem,
};
use qcorr::nonlocality::{bell_threshold, bell_violation, gws_bell_violation, horodecki_m};
use qcorr::optim::golden_section_max;
use qcorr::random::{chacha, random_density, random_hermitian, random_su2};
use qcorr::states::{bloch_decompose, gws, mix, x_state, GwsParams, XStateParams};
use qcorr::steering::{steerable_weight_s2, steerable_weight_s3};

fn params(p: f64, q: f64) -> GwsParams<f64> {
    GwsParams::new(p, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_forms_match_the_general_measures(p in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        let pr = params(p, q);
        let rho = gws(pr);
        let n = negativity(&rho).unwrap();
        prop_assert!((n - gws_negativity(&pr)).abs() <= 1e-8);
        let b = bell_violation(&rho).unwrap();
        prop_assert!((b - gws_bell_violation(&pr)).abs() <= 1e-8);
    }

    #[test]
    fn measures_stay_in_range_on_random_states(seed in any::<u64>()) {
        let rho = random_density::<f64>(&mut chacha(seed));
        let n = negativity(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
        let b = bell_violation(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&b));
        let m = horodecki_m(&rho).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&m));
    }

    #[test]
    fn partial_transpose_involutes_and_partial_trace_normalizes(seed in any::<u64>()) {
        let rho = random_density::<f64>(&mut chacha(seed));
        for sub in [Subsystem::First, Subsystem::Second] {
            let pt = partial_transpose(rho.matrix(), sub).unwrap();
            let back = partial_transpose(&pt, sub).unwrap();
            prop_assert!(back.max_abs_diff(rho.matrix()) == 0.0);
            let red = partial_trace(rho.matrix(), sub).unwrap();
            prop_assert!((red.trace().re - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn bloch_decomposition_round_trips(seed in any::<u64>()) {
        let rho = random_density::<f64>(&mut chacha(seed));
        let back = bloch_decompose(&rho).assemble();
        prop_assert!(back.max_abs_diff(rho.matrix()) <= 1e-9);
    }

    #[test]
    fn fidelity_is_symmetric_in_its_arguments(seed in any::<u64>()) {
        let mut rng = chacha(seed);
        let a = random_density::<f64>(&mut rng);
        let b = random_density::<f64>(&mut rng);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() <= 1e-8);
        prop_assert!((0.0..=1.0 + 1e-10).contains(&fab));
    }

    #[test]
    fn density_json_round_trips(seed in any::<u64>()) {
        let rho = random_density::<f64>(&mut chacha(seed));
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix<f64> = serde_json::from_str(&text).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
    }

    #[test]
    fn mixing_family_members_keeps_states_valid(
        p1 in 0.0..=1.0f64, q1 in 0.0..=1.0f64,
        p2 in 0.0..=1.0f64, q2 in 0.0..=1.0f64,
        w in 0.0..=1.0f64,
    ) {
        let mixed = mix(&gws(params(p1, q1)), &gws(params(p2, q2)), w).unwrap();
        // re-validate through the checking constructor
        DensityMatrix::new(mixed.matrix().clone()).unwrap();
    }

    #[test]
    fn entanglement_is_invariant_under_local_unitaries(
        p in 0.0..=1.0f64, q in 0.0..=1.0f64, seed in any::<u64>(),
    ) {
        let rho = gws(params(p, q));
        let mut rng = chacha(seed);
        let u = random_su2::<f64>(&mut rng).kron(&random_su2(&mut rng));
        let rotated = (&(&u * rho.matrix()) * &u.dagger()).hermitian_part();
        let rotated = DensityMatrix::new(rotated).unwrap();
        let before = negativity(&rho).unwrap();
        let after = negativity(&rotated).unwrap();
        prop_assert!((before - after).abs() <= 1e-9);
    }

    #[test]
    fn eigendecomposition_reconstructs_random_hermitians(
        seed in any::<u64>(), n in 2usize..=6,
    ) {
        let h = random_hermitian::<f64>(n, &mut chacha(seed));
        let (vals, vecs) = eig_hermitian(&h).unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let mut rec = ComplexMatrix::<f64>::zeros(n, n);
        for (k, &lam) in vals.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    rec[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj().scale(lam);
                }
            }
        }
        prop_assert!(rec.max_abs_diff(&h) <= 1e-9);
    }

    #[test]
    fn thresholds_and_measures_are_symmetric_in_q(p in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        prop_assert!(
            (negativity_threshold(q).unwrap() - negativity_threshold(1.0 - q).unwrap()).abs()
                <= 1e-12
        );
        prop_assert!(
            (bell_threshold(q).unwrap() - bell_threshold(1.0 - q).unwrap()).abs() <= 1e-12
        );
        let low = negativity(&gws(params(p, q))).unwrap();
        let high = negativity(&gws(params(p, 1.0 - q))).unwrap();
        prop_assert!((low - high).abs() <= 1e-9);
    }

    #[test]
    fn x_state_negativity_matches_the_block_formula(
        raw in prop::array::uniform4(1e-3..1.0f64),
        fe in 0.0..=1.0f64, ff in 0.0..=1.0f64,
        pe in 0.0..std::f64::consts::TAU, pf in 0.0..std::f64::consts::TAU,
    ) {
        let total: f64 = raw.iter().sum();
        let [a, b, c, d] = raw.map(|v| v / total);
        let e = Complex::from_polar(fe * (a * d).sqrt(), pe);
        let f = Complex::from_polar(ff * (b * c).sqrt(), pf);
        let rho = x_state(&XStateParams { a, b, c, d, e, f }).unwrap();

        // partial transposition swaps the two coherences, so the spectrum
        // splits into two 2x2 blocks that can be diagonalized by hand
        let outer_min = (a + d) / 2.0 - ((a - d).powi(2) / 4.0 + f.norm_sqr()).sqrt();
        let inner_min = (b + c) / 2.0 - ((b - c).powi(2) / 4.0 + e.norm_sqr()).sqrt();
        let expected = (-2.0 * outer_min.min(inner_min)).max(0.0);
        let computed = negativity(&rho).unwrap();
        prop_assert!(
            (computed - expected).abs() <= 1e-9,
            "computed {computed}, expected {expected}"
        );
    }

    #[test]
    fn golden_section_finds_quadratic_vertices(v in 0.05..=0.95f64) {
        let (x, _) = golden_section_max(|x: f64| -(x - v) * (x - v), 0.0, 1.0, 1e-6);
        prop_assert!((x - v).abs() <= 1e-5);
    }
}

proptest! {
    // steering weights run the interior-point solver, so fewer cases
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steering_hierarchy_is_consistent_on_the_family(
        p in 0.0..=1.0f64, q in 0.0..=1.0f64,
    ) {
        let rho = gws(params(p, q));
        let s3 = steerable_weight_s3(&rho).unwrap();
        let s2 = steerable_weight_s2(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&s3));
        prop_assert!((0.0..=1.0).contains(&s2));
        prop_assert!(s3 >= s2 - 1e-6, "S3 = {s3} below S2 = {s2}");
        // the full flag set classifies without ordering violations
        let n = negativity(&rho).unwrap();
        let b = bell_violation(&rho).unwrap();
        let label = classify_values(n, s3, s2, b, &Cutoffs::default()).unwrap();
        prop_assert!((1..=5).contains(&label.id));
    }
}
