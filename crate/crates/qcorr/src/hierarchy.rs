//! Regime classification and threshold geometry in the `(p, q)` plane.
//!
//! The four detection criteria are strictly ordered on the states built by
//! [`crate::states::gws`]: Bell nonlocality implies two-setting
//! steerability, which implies three-setting steerability, which implies
//! entanglement. For fixed `q` each criterion switches on at a critical
//! mixing weight, so a state belongs to one of five regimes:
//!
//! 1. none of the criteria fire,
//! 2. entangled only,
//! 3. additionally three-setting steerable,
//! 4. additionally two-setting steerable,
//! 5. additionally Bell nonlocal.
//!
//! The gap between two thresholds measures how long a state stays inside a
//! regime band as `p` grows; its maximum over `q` locates the asymmetry
//! that separates the criteria most.

use std::fmt;
use std::str::FromStr;

use crate::entanglement::negativity_threshold;
use crate::nonlocality::bell_threshold;
use crate::optim::golden_section_max;
use crate::report::CorrelationReport;
use crate::scalar::Scalar;
use crate::states::{gws, GwsParams};
use crate::steering::{steerable_weight_s2, steerable_weight_s3};
use crate::tol;
use crate::{Error, Result};

/// One of the four detection criteria, in increasing order of strength.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Measure {
    /// Entanglement, witnessed by a nonzero negativity.
    Negativity,
    /// Three-setting steerable weight.
    S3,
    /// Two-setting steerable weight (best Pauli pair).
    S2,
    /// Bell-CHSH violation.
    Bell,
}

pub const MEASURES: [Measure; 4] = [Measure::Negativity, Measure::S3, Measure::S2, Measure::Bell];

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::Negativity => "N",
            Measure::S3 => "S3",
            Measure::S2 => "S2",
            Measure::Bell => "B",
        };
        f.write_str(s)
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "negativity" => Ok(Measure::Negativity),
            "s3" => Ok(Measure::S3),
            "s2" => Ok(Measure::S2),
            "b" | "bell" => Ok(Measure::Bell),
            other => Err(Error::ParamOutOfRange {
                name: "measure",
                value: f64::NAN,
                expected: match other.is_empty() {
                    true => "one of N, S3, S2, B",
                    false => "one of N, S3, S2, B (case-insensitive)",
                },
            }),
        }
    }
}

/// Decision levels below which a measure counts as zero. Steerable weights
/// come out of an interior-point solve and carry more noise than the
/// eigenvalue-based measures, hence the looser default.
#[derive(Clone, Copy, Debug)]
pub struct Cutoffs<T> {
    pub measure: T,
    pub weight: T,
}

impl<T: Scalar> Default for Cutoffs<T> {
    fn default() -> Self {
        Cutoffs {
            measure: tol::floor_eps(tol::MEASURE_ZERO),
            weight: tol::floor_eps(tol::WEIGHT_ZERO),
        }
    }
}

/// Which regime a state falls in, with the individual criterion flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RegimeLabel {
    /// Regime number, 1 through 5.
    pub id: u8,
    pub entangled: bool,
    pub s3_steerable: bool,
    pub s2_steerable: bool,
    pub bell_nonlocal: bool,
}

/// Classify a report into one of the five regimes. Fails with
/// [`Error::InconsistentHierarchy`] if the flags violate the criterion
/// ordering, which indicates the inputs were computed incorrectly or sit
/// exactly on a boundary at the cutoff scale.
pub fn classify<T: Scalar>(
    report: &CorrelationReport<T>,
    cutoffs: &Cutoffs<T>,
) -> Result<RegimeLabel> {
    classify_values(
        report.negativity,
        report.s3,
        report.s2,
        report.bell,
        cutoffs,
    )
}

/// [`classify`] on bare measure values.
pub fn classify_values<T: Scalar>(
    negativity: T,
    s3: T,
    s2: T,
    bell: T,
    cutoffs: &Cutoffs<T>,
) -> Result<RegimeLabel> {
    let entangled = negativity > cutoffs.measure;
    let s3_steerable = s3 > cutoffs.weight;
    let s2_steerable = s2 > cutoffs.weight;
    let bell_nonlocal = bell > cutoffs.measure;

    let chain = [bell_nonlocal, s2_steerable, s3_steerable, entangled];
    if chain.windows(2).any(|w| w[0] && !w[1]) {
        return Err(Error::InconsistentHierarchy(format!(
            "flags violate criterion ordering: entangled={} (N={:.3e}), s3={} (S3={:.3e}), \
             s2={} (S2={:.3e}), bell={} (B={:.3e})",
            entangled,
            negativity.as_f64(),
            s3_steerable,
            s3.as_f64(),
            s2_steerable,
            s2.as_f64(),
            bell_nonlocal,
            bell.as_f64(),
        )));
    }

    let id = 1 + chain.iter().filter(|&&f| f).count() as u8;
    Ok(RegimeLabel {
        id,
        entangled,
        s3_steerable,
        s2_steerable,
        bell_nonlocal,
    })
}

fn check_tol<T: Scalar>(tol_: T) -> Result<()> {
    if !(tol_.as_f64() >= 1e-4 && tol_.as_f64() < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "tol",
            value: tol_.as_f64(),
            expected: "[1e-4, 1)",
        });
    }
    Ok(())
}

fn weight_at<T: Scalar>(measure: Measure, p: T, q: T) -> Result<T> {
    let state = gws(GwsParams::new(p, q)?);
    match measure {
        Measure::S3 => steerable_weight_s3(&state),
        Measure::S2 => steerable_weight_s2(&state),
        _ => unreachable!("only steering weights are bisected"),
    }
}

/// [`threshold`] without the tolerance floor, so the optimizers can run the
/// bisection tight enough to resolve the very flat gap maxima.
fn threshold_unchecked<T: Scalar>(measure: Measure, q: T, tol_: T) -> Result<T> {
    match measure {
        Measure::Negativity => negativity_threshold(q),
        Measure::Bell => bell_threshold(q),
        Measure::S3 | Measure::S2 => {
            let cutoff = Cutoffs::<T>::default().weight;
            let mut lo = negativity_threshold(q)?;
            let mut hi = T::one();
            if weight_at(measure, hi, q)? <= cutoff {
                return Err(Error::NotFound(format!(
                    "{measure} stays below cutoff on the whole mixing range at q = {}",
                    q.as_f64()
                )));
            }
            while hi - lo > tol_ {
                let mid = (lo + hi) * T::of(0.5);
                if mid <= lo || mid >= hi {
                    break; // tol below the scalar's resolution here
                }
                if weight_at(measure, mid, q)? > cutoff {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok((lo + hi) * T::of(0.5))
        }
    }
}

/// Critical mixing weight at which `measure` switches on for fixed `q`.
///
/// Negativity and Bell thresholds are closed-form; the steering thresholds
/// are bisected to `tol` (at least `1e-4`) over the steerable weight,
/// starting from the entanglement threshold below which every weight
/// vanishes. Returns [`Error::NotFound`] if the measure never fires on
/// `p <= 1`.
pub fn threshold<T: Scalar>(measure: Measure, q: T, tol_: T) -> Result<T> {
    if matches!(measure, Measure::S3 | Measure::S2) {
        check_tol(tol_)?;
    }
    threshold_unchecked(measure, q, tol_)
}

fn threshold_gap_unchecked<T: Scalar>(
    initial: Measure,
    final_measure: Measure,
    q: T,
    tol_: T,
) -> Result<T> {
    Ok(threshold_unchecked(initial, q, tol_)? - threshold_unchecked(final_measure, q, tol_)?)
}

/// Width `p_initial - p_final` of the band between two thresholds at fixed
/// `q`. Positive when `initial` is the stronger criterion.
pub fn threshold_gap<T: Scalar>(
    initial: Measure,
    final_measure: Measure,
    q: T,
    tol_: T,
) -> Result<T> {
    Ok(threshold(initial, q, tol_)? - threshold(final_measure, q, tol_)?)
}

/// Location and value of the widest threshold band over the asymmetry
/// range.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct OptimalQ<T> {
    pub q: T,
    pub gap: T,
}

/// Bisection tolerance for the coarse scan in [`optimal_q`]; tight enough
/// that the best cell brackets the true maximum even on the flattest pairs.
const COARSE_EVAL_TOL: f64 = 1e-6;
/// Bisection tolerance for the refinement stages. The gap curves can be
/// flat to a few parts in 1e5 across a whole coarse cell, so the threshold
/// noise must sit well below that for the argmax to be meaningful.
const REFINE_EVAL_TOL: f64 = 3e-8;
/// Half-width of the symmetric sample window for the quadratic polish.
const POLISH_HALF_WIDTH: f64 = 5e-3;

/// Maximize the threshold gap over `q` in `(0, 1/2]`: coarse scan in steps
/// of `0.01`, golden-section refinement of the best cell down to
/// `refine_tol` (at least `1e-4`), then a local quadratic fit through nine
/// tightly evaluated samples to pin the vertex. The quadratic stage is what
/// makes the flat maxima reproducible: near the optimum the gap varies by
/// less than the coarse bisection noise over several cells, so a pointwise
/// search alone lands anywhere on the plateau. A fitted vertex at or past
/// `q = 1/2` folds to exactly `1/2`, where the symmetric family peaks.
pub fn optimal_q<T: Scalar>(
    initial: Measure,
    final_measure: Measure,
    refine_tol: T,
) -> Result<OptimalQ<T>> {
    check_tol(refine_tol)?;
    let coarse_tol = T::of(COARSE_EVAL_TOL);
    let refine_eval = T::of(REFINE_EVAL_TOL);

    let mut best_i = 1usize;
    let mut best_gap = T::neg_infinity();
    for i in 1..=50usize {
        let q = T::of(i as f64 / 100.0);
        let gap = threshold_gap_unchecked(initial, final_measure, q, coarse_tol)?;
        if gap > best_gap {
            best_gap = gap;
            best_i = i;
        }
    }

    let lo = T::of(((best_i as f64 - 1.0) / 100.0).max(1e-3));
    let hi = T::of((best_i as f64 + 1.0).min(50.0) / 100.0);

    let mut failure: Option<Error> = None;
    let objective = |q: T| -> T {
        if failure.is_some() {
            return T::neg_infinity();
        }
        match threshold_gap_unchecked(initial, final_measure, q, refine_eval) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                T::neg_infinity()
            }
        }
    };
    let (q_star, _) = golden_section_max(objective, lo, hi, refine_tol);
    if let Some(e) = failure {
        return Err(e);
    }

    // Quadratic polish: least-squares parabola through a symmetric window
    // around the golden-section point. Sampling is allowed to cross 1/2
    // because every threshold curve is symmetric under q <-> 1-q, so the
    // fit stays faithful there; the vertex is folded back afterwards.
    let half = T::of(POLISH_HALF_WIDTH);
    let center = q_star.max(T::of(1e-3) + half).min(T::of(0.999) - half);
    let mut s2 = T::zero();
    let mut s4 = T::zero();
    let mut sy = T::zero();
    let mut suy = T::zero();
    let mut suuy = T::zero();
    let n = 9usize;
    for k in 0..n {
        let u = T::of((k as f64 - 4.0) / 4.0) * half;
        let y = threshold_gap_unchecked(initial, final_measure, center + u, refine_eval)?;
        s2 += u * u;
        s4 += u * u * u * u;
        sy += y;
        suy += u * y;
        suuy += u * u * y;
    }
    // Odd moments vanish on the symmetric grid, so the normal equations
    // decouple: slope from (u, y), curvature from (u^2, y).
    let nn = T::of(n as f64);
    let beta1 = suy / s2;
    let beta2 = (nn * suuy - s2 * sy) / (nn * s4 - s2 * s2);
    let vertex = center - beta1 / (beta2 * T::of(2.0));
    let half_point = T::of(0.5);

    let mut candidates = vec![T::of(best_i as f64 / 100.0), q_star];
    if beta2 < T::zero() && (vertex - center).abs() <= half {
        candidates.push(if vertex >= half_point {
            half_point
        } else {
            vertex
        });
    } else if q_star >= half_point - refine_tol {
        // Concavity was lost to noise right at the symmetric endpoint;
        // the constrained maximum is the endpoint itself.
        candidates.push(half_point);
    }

    let mut best = None;
    for q in candidates {
        let gap = threshold_gap_unchecked(initial, final_measure, q, refine_eval)?;
        match best {
            Some(OptimalQ { gap: g, .. }) if g >= gap => {}
            _ => best = Some(OptimalQ { q, gap }),
        }
    }
    Ok(best.expect("candidate list is never empty"))
}

/// Asymmetry that maximizes the entanglement-to-nonlocality gap, computed
/// from the stationarity condition rather than by scanning. The optimum
/// satisfies `(1 + 4x^2)^3 = x^2 (1 + 4x)^4` with `x = sqrt(q(1-q))`;
/// the root is bracketed on `[0.01, 0.49]` and bisected to machine
/// precision, then folded back to `q`.
pub fn optimal_q_analytic<T: Scalar>() -> T {
    let g = |x: T| {
        let x2 = x * x;
        let four = T::of(4.0);
        let lhs = (T::one() + four * x2).powi(3);
        let rhs = x2 * (T::one() + four * x).powi(4);
        lhs - rhs
    };
    let mut lo = T::of(0.01);
    let mut hi = T::of(0.49);
    debug_assert!(g(lo) > T::zero() && g(hi) < T::zero());
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (lo + hi) * T::of(0.5);
    (T::one() - (T::one() - T::of(4.0) * x * x).sqrt()) * T::of(0.5)
}

/// One row of [`gap_table`]: the threshold band for a pair of criteria at
/// its widest, compared against the symmetric point `q = 1/2`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GapTableRow<T> {
    /// `"B->N"`-style label, stronger criterion first.
    pub transition: String,
    pub q_opt: T,
    pub p_initial: T,
    pub p_final: T,
    pub gap_at_opt: T,
    pub gap_at_half: T,
    /// `gap_at_opt - gap_at_half`: what tuning the asymmetry buys.
    pub advantage: T,
}

pub const GAP_TABLE_PAIRS: [(Measure, Measure); 6] = [
    (Measure::Bell, Measure::Negativity),
    (Measure::Bell, Measure::S3),
    (Measure::Bell, Measure::S2),
    (Measure::S2, Measure::Negativity),
    (Measure::S2, Measure::S3),
    (Measure::S3, Measure::Negativity),
];

/// Widest threshold bands for all strictly ordered criterion pairs.
///
/// The per-row columns are re-evaluated at the tight internal tolerance at
/// the located optimum, so `gap_at_opt` always equals
/// `p_initial - p_final` and `advantage` equals `gap_at_opt - gap_at_half`
/// exactly as printed.
pub fn gap_table<T: Scalar>() -> Result<Vec<GapTableRow<T>>> {
    let refine_tol = T::of(1e-4);
    let eval_tol = T::of(REFINE_EVAL_TOL);
    let mut rows = Vec::with_capacity(GAP_TABLE_PAIRS.len());
    for (initial, final_measure) in GAP_TABLE_PAIRS {
        let best = optimal_q(initial, final_measure, refine_tol)?;
        let p_initial = threshold_unchecked(initial, best.q, eval_tol)?;
        let p_final = threshold_unchecked(final_measure, best.q, eval_tol)?;
        let gap_at_opt = p_initial - p_final;
        let gap_at_half = threshold_gap_unchecked(initial, final_measure, T::of(0.5), eval_tol)?;
        rows.push(GapTableRow {
            transition: format!("{initial}->{final_measure}"),
            q_opt: best.q,
            p_initial,
            p_final,
            gap_at_opt,
            gap_at_half,
            advantage: gap_at_opt - gap_at_half,
        });
    }
    Ok(rows)
}
