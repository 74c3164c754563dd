//! EPR steering via steerable weights.
//!
//! Alice measures a set of +-1-valued observables on her half of `rho`; the
//! conditional states left on Bob's side form the assemblage. The
//! steerable weight is the smallest fraction of the assemblage that cannot
//! be explained by a local hidden-state model; `1 - weight` is the optimum
//! of a semidefinite program over one response operator per deterministic
//! answer strategy. Three settings (X, Y, Z) give the weight `S3`; pairs
//! give `S2` variants, optionally optimized over a shared rotation of the
//! measurement axes.

use std::cell::RefCell;

use crate::linalg::{eig_hermitian, partial_trace, ComplexMatrix, DensityMatrix, Subsystem};
use crate::optim::nelder_mead_max;
use crate::random::euler_su2;
use crate::scalar::Scalar;
use crate::sdp::{self, SdpConstraint, SdpProblem, SdpStatus};
use crate::states::{pauli, PauliAxis};
use crate::tol;
use crate::{Error, Result};

/// Measurement outcome of a +-1-valued observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

pub const OUTCOMES: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

/// Which two Pauli axes a two-setting weight uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SettingPair {
    XY,
    XZ,
    YZ,
}

pub const SETTING_PAIRS: [SettingPair; 3] = [SettingPair::XY, SettingPair::XZ, SettingPair::YZ];

impl SettingPair {
    pub fn axes(&self) -> (PauliAxis, PauliAxis) {
        match self {
            SettingPair::XY => (PauliAxis::X, PauliAxis::Y),
            SettingPair::XZ => (PauliAxis::X, PauliAxis::Z),
            SettingPair::YZ => (PauliAxis::Y, PauliAxis::Z),
        }
    }
}

/// Bob-side conditional states `sigma_{a|x} = tr_A[(Pi_{a|x} (x) I) rho]`,
/// one per (setting, outcome). Construction checks positivity and
/// no-signalling.
#[derive(Clone, Debug)]
pub struct Assemblage<T> {
    entries: Vec<[ComplexMatrix<T>; 2]>,
}

impl<T: Scalar> Assemblage<T> {
    pub fn num_settings(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, setting: usize, outcome: Outcome) -> &ComplexMatrix<T> {
        let idx = match outcome {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        };
        &self.entries[setting][idx]
    }
}

/// Build the assemblage of `rho` for Alice observables with spectrum
/// `{-1, +1}` (each 2x2 Hermitian; validated).
pub fn assemblage<T: Scalar>(
    rho: &DensityMatrix<T>,
    observables: &[ComplexMatrix<T>],
) -> Result<Assemblage<T>> {
    let budget = tol::floor_eps::<T>(tol::ASSEMBLAGE);
    let mut entries = Vec::with_capacity(observables.len());
    for obs in observables {
        if obs.rows() != 2 || obs.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "observable must be 2x2, got {}x{}",
                obs.rows(),
                obs.cols()
            )));
        }
        let (vals, vecs) = eig_hermitian(obs)?;
        if (vals[0] + T::one()).abs() > budget || (vals[1] - T::one()).abs() > budget {
            return Err(Error::InvalidObservable(vals[0].as_f64(), vals[1].as_f64()));
        }
        let column = |k: usize| ComplexMatrix::ket(&[vecs[(0, k)], vecs[(1, k)]]);
        // ascending eigenvalues: column 0 is the -1 eigenvector
        let pair = [column(1), column(0)].map(|v| {
            let proj = v.outer(&v);
            let lifted = &proj.kron(&ComplexMatrix::identity(2)) * rho.matrix();
            partial_trace(&lifted, Subsystem::First).expect("4x4 by construction")
        });
        entries.push(pair);
    }

    let asm = Assemblage { entries };
    let reduced = rho.partial_trace(Subsystem::First);
    for (x, pair) in asm.entries.iter().enumerate() {
        let _ = x;
        for part in pair {
            let vals = crate::linalg::eigvals_hermitian(&part.hermitian_part())?;
            if vals[0] < -budget {
                return Err(Error::InvalidAssemblage {
                    what: "positivity",
                    dev: (-vals[0]).as_f64(),
                });
            }
        }
        let total = &pair[0] + &pair[1];
        let dev = total.max_abs_diff(&reduced);
        if dev > budget {
            return Err(Error::InvalidAssemblage {
                what: "no-signalling",
                dev: dev.as_f64(),
            });
        }
    }
    Ok(asm)
}

/// The steering SDP for an assemblage over `k` settings: `2^k` response
/// operators indexed by answer strings in binary ascending order (last
/// setting fastest, bit 1 = outcome +1), constrained under every
/// conditional state.
fn steering_problem<T: Scalar>(asm: &Assemblage<T>) -> Result<SdpProblem<T>> {
    let k = asm.num_settings();
    let nv = 1usize << k;
    let mut constraints = Vec::with_capacity(2 * k);
    for s in 0..k {
        for outcome in OUTCOMES {
            let want = match outcome {
                Outcome::Plus => 1usize,
                Outcome::Minus => 0usize,
            };
            let vars: Vec<usize> = (0..nv).filter(|i| (i >> (k - 1 - s)) & 1 == want).collect();
            constraints.push(SdpConstraint {
                constant: asm.entry(s, outcome).clone(),
                vars,
            });
        }
    }
    SdpProblem::new(nv, constraints)
}

fn weight_of<T: Scalar>(asm: &Assemblage<T>) -> Result<T> {
    let problem = steering_problem(asm)?;
    let solution = sdp::solve(&problem)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::SolverFailure {
            status: solution.status,
            iterations: solution.iterations,
            gap: solution.duality_gap.as_f64(),
        });
    }
    Ok((T::one() - solution.objective_value)
        .max(T::zero())
        .min(T::one()))
}

/// Three-setting steerable weight with Alice measuring X, Y, Z.
pub fn steerable_weight_s3<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let obs = [
        pauli::<T>(PauliAxis::X),
        pauli::<T>(PauliAxis::Y),
        pauli::<T>(PauliAxis::Z),
    ];
    weight_of(&assemblage(rho, &obs)?)
}

/// Two-setting steerable weight for arbitrary +-1-valued observables.
pub fn steerable_weight_s2_observables<T: Scalar>(
    rho: &DensityMatrix<T>,
    first: &ComplexMatrix<T>,
    second: &ComplexMatrix<T>,
) -> Result<T> {
    weight_of(&assemblage(rho, &[first.clone(), second.clone()])?)
}

/// Two-setting steerable weight for a fixed Pauli pair.
pub fn steerable_weight_s2_pair<T: Scalar>(rho: &DensityMatrix<T>, pair: SettingPair) -> Result<T> {
    let (a, b) = pair.axes();
    steerable_weight_s2_observables(rho, &pauli(a), &pauli(b))
}

/// Best two-setting weight over the three Pauli pairs.
pub fn steerable_weight_s2<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let mut best = T::zero();
    for pair in SETTING_PAIRS {
        best = best.max(steerable_weight_s2_pair(rho, pair)?);
    }
    Ok(best)
}

/// Two-setting weight additionally maximized over a shared rotation
/// `U sigma_i U^dagger` of the measurement axes: a coarse Euler-angle scan
/// followed by a simplex refinement.
pub fn steerable_weight_s2_optimized<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let base = steerable_weight_s2(rho)?;

    // capture the first solver error and short-circuit the remaining scan;
    // the optimizers only see plain values
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut objective = |angles: &[T]| -> T {
        if failure.borrow().is_some() {
            return T::of(-1.0);
        }
        match rotated_pair_weight(rho, angles) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                T::of(-1.0)
            }
        }
    };

    let steps = 12usize;
    let two_pi = T::of(2.0 * std::f64::consts::PI);
    let mut best_angles = [T::zero(); 3];
    let mut best = T::of(-1.0);
    for ia in 0..steps {
        for ib in 0..steps {
            for ig in 0..steps {
                let angles = [
                    two_pi * T::of(ia as f64) / T::of(steps as f64),
                    T::PI() * T::of(ib as f64) / T::of(steps as f64),
                    two_pi * T::of(ig as f64) / T::of(steps as f64),
                ];
                let v = objective(&angles);
                if v > best {
                    best = v;
                    best_angles = angles;
                }
            }
        }
    }

    let (_, refined) = nelder_mead_max(&mut objective, &best_angles, T::of(0.05), 200);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(base.max(best).max(refined).min(T::one()))
}

fn rotated_pair_weight<T: Scalar>(rho: &DensityMatrix<T>, angles: &[T]) -> Result<T> {
    let u = euler_su2(angles[0], angles[1], angles[2]);
    let ud = u.dagger();
    let rotated: Vec<ComplexMatrix<T>> = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z]
        .iter()
        .map(|&ax| &(&u * &pauli(ax)) * &ud)
        .collect();
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut best = T::zero();
    for (i, j) in pairs {
        best = best.max(steerable_weight_s2_observables(
            rho,
            &rotated[i],
            &rotated[j],
        )?);
    }
    Ok(best)
}
