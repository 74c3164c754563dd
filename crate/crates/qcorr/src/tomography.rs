//! Simulated projective tomography and maximum-likelihood reconstruction.
//!
//! Both qubits are measured in the three mutually unbiased single-qubit
//! bases, giving the 6 x 6 grid of product projectors used in standard
//! two-qubit polarization tomography. Counts are Poisson-distributed
//! around `exposure * p_k`; reconstruction iterates the `R rho R` map,
//! whose fixed point maximizes the likelihood; [`fit_pq`] then projects a
//! reconstructed state back onto the two-parameter family via fidelity
//! maximization.

use std::cell::RefCell;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::linalg::{fidelity_with_sqrt, sqrt_psd, ComplexMatrix, DensityMatrix};
use crate::optim::nelder_mead_max;
use crate::random::{chacha, RNG_ALGORITHM};
use crate::scalar::Scalar;
use crate::states::{gws, ket0, ket1, ket_left, ket_minus, ket_plus, ket_right, GwsParams};
use crate::{Error, Result};

/// Polarization-style labels for the six single-qubit analysis states, in
/// the order the projector grid uses.
pub const STATE_LABELS: [&str; 6] = ["H", "V", "D", "A", "R", "L"];

fn analysis_kets<T: Scalar>() -> [ComplexMatrix<T>; 6] {
    [
        ket0(),
        ket1(),
        ket_plus(),
        ket_minus(),
        ket_right(),
        ket_left(),
    ]
}

/// The 36 product projectors `|a><a| (x) |b><b|`, first-qubit label major.
#[derive(Clone, Debug)]
pub struct ProjectionSet<T> {
    projectors: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> ProjectionSet<T> {
    pub fn standard() -> Self {
        let kets = analysis_kets::<T>();
        let singles: Vec<ComplexMatrix<T>> = kets.iter().map(|k| k.outer(k)).collect();
        let mut projectors = Vec::with_capacity(36);
        for pa in &singles {
            for pb in &singles {
                projectors.push(pa.kron(pb));
            }
        }
        ProjectionSet { projectors }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, k: usize) -> &ComplexMatrix<T> {
        &self.projectors[k]
    }

    /// `(first, second)` qubit labels of projector `k`.
    pub fn labels(&self, k: usize) -> (&'static str, &'static str) {
        (STATE_LABELS[k / 6], STATE_LABELS[k % 6])
    }

    /// Born probabilities `tr(rho Pi_k)`, clamped to `[0, 1]`.
    pub fn probabilities(&self, rho: &DensityMatrix<T>) -> Vec<T> {
        self.projectors
            .iter()
            .map(|p| {
                rho.matrix()
                    .trace_product(p)
                    .re
                    .max(T::zero())
                    .min(T::one())
            })
            .collect()
    }
}

/// Raw counts from one simulated tomography run, with enough metadata to
/// reproduce it.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CountRecord<T> {
    /// 36 counts in projector-grid order.
    pub counts: Vec<u64>,
    /// Mean total events per projector at unit probability.
    pub exposure: T,
    pub seed: u64,
    pub rng: &'static str,
}

/// Draw Poisson counts `n_k ~ Poisson(exposure * p_k)` for every projector
/// of the standard set, from a seeded generator.
pub fn simulate_counts<T: Scalar>(
    rho: &DensityMatrix<T>,
    exposure: T,
    seed: u64,
) -> Result<CountRecord<T>> {
    let exp_f = exposure.as_f64();
    if !(exp_f.is_finite() && exp_f > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "exposure",
            value: exp_f,
            expected: "(0, inf)",
        });
    }
    let set = ProjectionSet::standard();
    let mut rng = chacha(seed);
    let counts = set
        .probabilities(rho)
        .iter()
        .map(|&p| {
            let mean = exp_f * p.as_f64();
            if mean > 0.0 {
                let dist = Poisson::new(mean)
                    .map_err(|_| Error::NumericalFailure("Poisson rate rejected"))?;
                Ok(dist.sample(&mut rng) as u64)
            } else {
                let _ = rng.gen::<f64>(); // keep the stream aligned
                Ok(0)
            }
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(CountRecord {
        counts,
        exposure,
        seed,
        rng: RNG_ALGORITHM,
    })
}

impl<T: Scalar> CountRecord<T> {
    /// CSV with one row per projector and the run metadata in leading
    /// comments.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema: tomography-counts/1\n");
        out.push_str(&format!("# rng: {}\n", self.rng));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# exposure: {:e}\n", self.exposure.as_f64()));
        out.push_str("alice_state,bob_state,count\n");
        for (k, &n) in self.counts.iter().enumerate() {
            let (a, b) = (STATE_LABELS[k / 6], STATE_LABELS[k % 6]);
            out.push_str(&format!("{a},{b},{n}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::BadStateFile(format!("counts CSV: {msg}"));
        let mut exposure: Option<f64> = None;
        let mut seed = 0u64;
        let mut counts: Vec<Option<u64>> = vec![None; 36];
        let index_of = |label: &str| STATE_LABELS.iter().position(|&l| l == label);

        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line == "alice_state,bob_state,count" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("exposure:") {
                    exposure = Some(
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| bad(format!("exposure: {e}")))?,
                    );
                } else if let Some(v) = rest.trim().strip_prefix("seed:") {
                    seed = v
                        .trim()
                        .parse::<u64>()
                        .map_err(|e| bad(format!("seed: {e}")))?;
                }
                continue;
            }
            let mut parts = line.split(',');
            let (a, b, n) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(n), None) => (a.trim(), b.trim(), n.trim()),
                _ => return Err(bad(format!("malformed row {line:?}"))),
            };
            let (ia, ib) = match (index_of(a), index_of(b)) {
                (Some(ia), Some(ib)) => (ia, ib),
                _ => return Err(bad(format!("unknown state label in row {line:?}"))),
            };
            let slot = &mut counts[ia * 6 + ib];
            if slot.is_some() {
                return Err(bad(format!("duplicate row for {a},{b}")));
            }
            *slot = Some(n.parse::<u64>().map_err(|e| bad(format!("count: {e}")))?);
        }

        let exposure = exposure.ok_or_else(|| bad("missing exposure metadata".into()))?;
        let counts = counts
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                c.ok_or_else(|| {
                    bad(format!(
                        "missing row {},{}",
                        STATE_LABELS[k / 6],
                        STATE_LABELS[k % 6]
                    ))
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(CountRecord {
            counts,
            exposure: T::of(exposure),
            seed,
            rng: RNG_ALGORITHM,
        })
    }
}

/// Floor under model probabilities inside the likelihood iteration, so
/// zero-probability projectors with nonzero observed counts cannot produce
/// infinities.
const PROB_FLOOR: f64 = 1e-15;

fn mle_core<T: Scalar>(
    values: &[T],
    exposure: T,
    max_iter: usize,
    tol: T,
) -> Result<DensityMatrix<T>> {
    if values.len() != 36 {
        return Err(Error::DimensionMismatch(format!(
            "expected 36 counts, got {}",
            values.len()
        )));
    }
    if values.iter().all(|v| *v == T::zero()) {
        return Err(Error::Degenerate("all tomography counts are zero"));
    }
    if exposure <= T::zero() {
        return Err(Error::ParamOutOfRange {
            name: "exposure",
            value: exposure.as_f64(),
            expected: "(0, inf)",
        });
    }

    let set = ProjectionSet::<T>::standard();
    let floor = T::of(PROB_FLOOR);
    let quarter = Complex::new(T::of(0.25), T::zero());
    let mut rho = DensityMatrix::new_unchecked(ComplexMatrix::identity(4).scale(quarter));

    let log_likelihood = |probs: &[T]| -> T {
        probs
            .iter()
            .zip(values)
            .map(|(&p, &n)| {
                let lam = exposure * p.max(floor);
                n * lam.ln() - lam
            })
            .fold(T::zero(), |a, b| a + b)
    };

    let mut prev_ll = T::neg_infinity();
    for _ in 0..max_iter {
        let probs = set.probabilities(&rho);
        let ll = log_likelihood(&probs);
        if (ll - prev_ll).abs() <= tol {
            break;
        }
        prev_ll = ll;

        let mut r = ComplexMatrix::zeros(4, 4);
        for (k, (&p, &n)) in probs.iter().zip(values).enumerate() {
            let ratio = n / (exposure * p.max(floor));
            r = &r + &set.projector(k).scale_re(ratio);
        }
        let raw = &(&r * rho.matrix()) * &r;
        let herm = raw.hermitian_part();
        let tr = herm.trace().re;
        if !(tr.is_finite() && tr > T::zero()) {
            return Err(Error::NumericalFailure("likelihood iteration lost trace"));
        }
        rho = DensityMatrix::new_unchecked(herm.scale_re(T::one() / tr));
    }

    DensityMatrix::new(rho.into_matrix())
}

/// Maximum-likelihood state from simulated counts: iterate the `R rho R`
/// map from the maximally mixed state until the log-likelihood gain drops
/// below `tol` or `max_iter` is reached.
pub fn mle_reconstruct<T: Scalar>(
    record: &CountRecord<T>,
    max_iter: usize,
    tol: T,
) -> Result<DensityMatrix<T>> {
    let values: Vec<T> = record.counts.iter().map(|&n| T::of(n as f64)).collect();
    mle_core(&values, record.exposure, max_iter, tol)
}

/// [`mle_reconstruct`] on real-valued frequencies (unit exposure): with
/// exact Born frequencies the iteration's fixed point is the underlying
/// state itself.
pub fn mle_reconstruct_frequencies<T: Scalar>(
    frequencies: &[T],
    max_iter: usize,
    tol: T,
) -> Result<DensityMatrix<T>> {
    mle_core(frequencies, T::one(), max_iter, tol)
}

/// Closest point of the two-parameter noisy-state family, by fidelity.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PqFit<T> {
    pub p: T,
    pub q: T,
    /// Fidelity between the input and the fitted family member.
    pub fidelity: T,
}

/// Fit `(p, q)` to an arbitrary state by maximizing fidelity against the
/// family: a `101 x 101` grid pass followed by simplex refinement to
/// around `1e-4`. Below `p = 1e-3` the asymmetry is unidentifiable (the
/// state is essentially white noise), and `q` is reported as `1/2`.
pub fn fit_pq<T: Scalar>(rho: &DensityMatrix<T>) -> Result<PqFit<T>> {
    let sqrt_rho = sqrt_psd(rho.matrix())?;

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let clamp01 = |v: T| v.max(T::zero()).min(T::one());
    let score = |p: T, q: T| -> T {
        if failure.borrow().is_some() {
            return T::of(-1.0);
        }
        let params = GwsParams::new(clamp01(p), clamp01(q)).expect("clamped");
        match fidelity_with_sqrt(&sqrt_rho, gws(params).matrix()) {
            Ok(f) => f,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                T::of(-1.0)
            }
        }
    };

    let mut best = (T::zero(), T::zero(), T::of(-1.0));
    for ip in 0..=100usize {
        for iq in 0..=100usize {
            let p = T::of(ip as f64 / 100.0);
            let q = T::of(iq as f64 / 100.0);
            let f = score(p, q);
            if f > best.2 {
                best = (p, q, f);
            }
        }
    }

    let (point, value) = nelder_mead_max(
        |x: &[T]| score(x[0], x[1]),
        &[best.0, best.1],
        T::of(0.005),
        160,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }

    let (mut p, mut q, mut fid) = (clamp01(point[0]), clamp01(point[1]), value);
    if fid < best.2 {
        (p, q, fid) = best;
    }
    if p < T::of(1e-3) {
        q = T::of(0.5);
    }
    Ok(PqFit {
        p,
        q,
        fidelity: fid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fidelity;
    use crate::states::werner;

    fn family(p: f64, q: f64) -> DensityMatrix<f64> {
        gws(GwsParams::new(p, q).unwrap())
    }

    #[test]
    fn projector_grid_is_complete_and_labeled() {
        let set = ProjectionSet::<f64>::standard();
        assert_eq!(set.len(), 36);
        assert!(!set.is_empty());
        assert_eq!(set.labels(0), ("H", "H"));
        assert_eq!(set.labels(7), ("V", "V"));
        assert_eq!(set.labels(35), ("L", "L"));
        assert_eq!(set.labels(6), ("V", "H"));

        let mut total = ComplexMatrix::<f64>::zeros(4, 4);
        for k in 0..36 {
            let pk = set.projector(k);
            // rank-one product projector: idempotent with unit trace
            assert!((pk.trace().re - 1.0).abs() <= 1e-14, "projector {k}");
            assert!((pk * pk).max_abs_diff(pk) <= 1e-14, "projector {k}");
            total = &total + pk;
        }
        // three complete bases per qubit: the grid sums to 3I (x) 3I
        let nine = ComplexMatrix::<f64>::identity(4).scale_re(9.0);
        assert!(total.max_abs_diff(&nine) <= 1e-13);
    }

    #[test]
    fn born_probabilities_of_a_computational_basis_state() {
        let set = ProjectionSet::<f64>::standard();
        let probs = set.probabilities(&family(1.0, 0.0)); // |00><00|
        let lookup = |a: &str, b: &str| {
            let ia = STATE_LABELS.iter().position(|&l| l == a).unwrap();
            let ib = STATE_LABELS.iter().position(|&l| l == b).unwrap();
            probs[ia * 6 + ib]
        };
        assert!((lookup("H", "H") - 1.0).abs() <= 1e-14);
        assert!(lookup("H", "V") <= 1e-14);
        assert!(lookup("V", "H") <= 1e-14);
        assert!((lookup("D", "D") - 0.25).abs() <= 1e-14);
        assert!((lookup("R", "L") - 0.25).abs() <= 1e-14);
        assert!((lookup("H", "D") - 0.5).abs() <= 1e-14);
        let sum: f64 = probs.iter().sum();
        assert!((sum - 9.0).abs() <= 1e-12);
    }

    #[test]
    fn simulated_counts_are_seeded_and_validated() {
        let rho = family(0.8, 0.1);
        let a = simulate_counts(&rho, 1e4, 21).unwrap();
        let b = simulate_counts(&rho, 1e4, 21).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.rng, "chacha8");
        let c = simulate_counts(&rho, 1e4, 22).unwrap();
        assert_ne!(a.counts, c.counts);

        for bad in [0.0, -5.0, f64::NAN, f64::INFINITY] {
            assert!(simulate_counts(&rho, bad, 1).is_err(), "exposure {bad}");
        }
    }

    #[test]
    fn impossible_projectors_collect_zero_counts() {
        // |00>: any measurement with V on the first qubit has probability 0
        let record = simulate_counts(&family(1.0, 0.0), 1e5, 3).unwrap();
        for b in 0..6 {
            assert_eq!(record.counts[6 + b], 0, "V row, column {b}");
        }
        // with exposure 1e5 the certain projector fires about 1e5 times
        assert!(record.counts[0] > 90_000 && record.counts[0] < 110_000);
    }

    #[test]
    fn counts_survive_the_csv_round_trip() {
        let record = simulate_counts(&family(0.7, 0.3), 2.5e3, 99).unwrap();
        let text = record.to_csv();
        assert!(text.starts_with("# schema: tomography-counts/1\n"));
        assert!(text.contains("alice_state,bob_state,count\n"));
        let back = CountRecord::<f64>::from_csv(&text).unwrap();
        assert_eq!(back.counts, record.counts);
        assert_eq!(back.seed, record.seed);
        assert!((back.exposure - record.exposure).abs() <= 1e-9);
    }

    #[test]
    fn csv_parser_rejects_corrupt_files() {
        let record = simulate_counts(&family(0.7, 0.3), 1e3, 5).unwrap();
        let good = record.to_csv();

        let missing_row: String =
            good.lines()
                .take(good.lines().count() - 1)
                .fold(String::new(), |mut acc, l| {
                    acc.push_str(l);
                    acc.push('\n');
                    acc
                });
        assert!(matches!(
            CountRecord::<f64>::from_csv(&missing_row),
            Err(Error::BadStateFile(_))
        ));

        let duplicated = format!("{good}H,H,17\n");
        assert!(CountRecord::<f64>::from_csv(&duplicated).is_err());

        let unknown_label = good.replace("\nL,L,", "\nQ,L,");
        assert!(CountRecord::<f64>::from_csv(&unknown_label).is_err());

        let no_exposure = good.replace("# exposure:", "# was:");
        assert!(CountRecord::<f64>::from_csv(&no_exposure).is_err());

        let bad_count = good.replace("\nH,V,", "\nH,V,x");
        assert!(CountRecord::<f64>::from_csv(&bad_count).is_err());
    }

    #[test]
    fn exact_frequencies_reproduce_the_state() {
        let truth = family(0.7, 0.2);
        let freqs = ProjectionSet::standard().probabilities(&truth);
        let rebuilt = mle_reconstruct_frequencies(&freqs, 5000, 1e-13).unwrap();
        let fid = fidelity(&rebuilt, &truth).unwrap();
        assert!(fid >= 1.0 - 1e-8, "fidelity {fid}");
        assert!(rebuilt.matrix().max_abs_diff(truth.matrix()) <= 1e-4);
    }

    #[test]
    fn likelihood_input_validation() {
        assert!(matches!(
            mle_reconstruct_frequencies(&[0.5f64; 10], 100, 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            mle_reconstruct_frequencies(&[0.0f64; 36], 100, 1e-10),
            Err(Error::Degenerate(_))
        ));
        let record = CountRecord {
            counts: vec![1u64; 36],
            exposure: -2.0f64,
            seed: 0,
            rng: RNG_ALGORITHM,
        };
        assert!(matches!(
            mle_reconstruct(&record, 100, 1e-10),
            Err(Error::ParamOutOfRange {
                name: "exposure",
                ..
            })
        ));
    }

    #[test]
    fn reconstruction_from_noisy_counts_is_a_valid_nearby_state() {
        let truth = werner(0.8f64).unwrap();
        let record = simulate_counts(&truth, 1e4, 11).unwrap();
        let rebuilt = mle_reconstruct(&record, 500, 1e-10).unwrap();
        // output re-validates as a state by construction; check it is close
        let fid = fidelity(&rebuilt, &truth).unwrap();
        assert!(fid >= 0.99, "fidelity {fid}");
    }

    #[test]
    fn longer_exposure_improves_average_fidelity() {
        let truth = family(0.9, 0.1);
        let mut means = Vec::new();
        for exposure in [1e3, 1e4, 1e5] {
            let mut total = 0.0;
            for seed in 0..20u64 {
                let record = simulate_counts(&truth, exposure, seed).unwrap();
                let rebuilt = mle_reconstruct(&record, 300, 1e-9).unwrap();
                total += fidelity(&rebuilt, &truth).unwrap();
            }
            means.push(total / 20.0);
        }
        assert!(
            means[0] < means[1] && means[1] < means[2],
            "mean fidelities {means:?} not improving"
        );
        assert!(means[2] >= 0.999);
    }

    #[test]
    fn family_fit_recovers_parameters() {
        let fit = fit_pq(&family(0.85, 0.25)).unwrap();
        assert!((fit.p - 0.85).abs() <= 1e-3, "p = {}", fit.p);
        assert!((fit.q - 0.25).abs() <= 1e-3, "q = {}", fit.q);
        assert!(fit.fidelity >= 1.0 - 1e-9);

        // asymmetry on the other side of the symmetric point
        let fit = fit_pq(&family(0.7, 0.8)).unwrap();
        assert!((fit.q - 0.8).abs() <= 1e-3, "q = {}", fit.q);
    }

    #[test]
    fn family_fit_reports_white_noise_as_symmetric() {
        let fit = fit_pq(&werner(0.0f64).unwrap()).unwrap();
        assert!(fit.p <= 1e-3);
        assert_eq!(fit.q, 0.5);
        assert!(fit.fidelity >= 1.0 - 1e-9);
    }

    #[test]
    fn record_serializes_with_metadata() {
        let record = simulate_counts(&family(0.5, 0.5), 1e3, 7).unwrap();
        let v: serde_json::Value = serde_json::to_value(&record).unwrap();
        assert_eq!(v["rng"], "chacha8");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["counts"].as_array().unwrap().len(), 36);
    }
}
