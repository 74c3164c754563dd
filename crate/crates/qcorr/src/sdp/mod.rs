//! Self-contained semidefinite-programming layer for steering-type
//! problems:
//!
//! ```text
//! maximize    sum_i tr(sigma_i)
//! subject to  sigma_i >= 0                          (2x2 Hermitian)
//!             C_j - sum_{i in S_j} sigma_i >= 0     per constraint j
//! ```
//!
//! Every steerable-weight program in this crate has exactly this shape;
//! the solver ([`solve`]) is a primal-dual Nesterov-Todd interior-point
//! method specialized to it. See [`solver`] for the iteration.

mod block2;
mod solver;

use crate::linalg::ComplexMatrix;
use crate::scalar::Scalar;
use crate::tol;
use crate::{Error, Result};
use std::io::Write;

/// One linear matrix constraint `constant - sum of the listed variables
/// >= 0`.
#[derive(Clone, Debug)]
pub struct SdpConstraint<T> {
    /// 2x2 Hermitian upper bound.
    pub constant: ComplexMatrix<T>,
    /// Indices of the variables appearing in the sum.
    pub vars: Vec<usize>,
}

/// A block SDP in the shape above. Construction validates the pieces;
/// solving is separate so options can vary.
#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    num_vars: usize,
    constraints: Vec<SdpConstraint<T>>,
}

impl<T: Scalar> SdpProblem<T> {
    pub fn new(num_vars: usize, constraints: Vec<SdpConstraint<T>>) -> Result<Self> {
        if num_vars == 0 || constraints.is_empty() {
            return Err(Error::Degenerate("SDP needs variables and constraints"));
        }
        let mut referenced = vec![false; num_vars];
        for (j, con) in constraints.iter().enumerate() {
            let c = &con.constant;
            if c.rows() != 2 || c.cols() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {j}: constant must be 2x2, got {}x{}",
                    c.rows(),
                    c.cols()
                )));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite);
            }
            let dev = c.hermiticity_deviation();
            if dev > tol::floor_eps(tol::HERMITIAN) {
                return Err(Error::NotHermitian {
                    max_dev: dev.as_f64(),
                });
            }
            for &i in &con.vars {
                if i >= num_vars {
                    return Err(Error::DimensionMismatch(format!(
                        "constraint {j} references variable {i} of {num_vars}"
                    )));
                }
                referenced[i] = true;
            }
        }
        if referenced.iter().any(|r| !r) {
            // an unconstrained variable makes the objective unbounded
            return Err(Error::Degenerate(
                "every SDP variable must appear in a constraint",
            ));
        }
        Ok(SdpProblem {
            num_vars,
            constraints,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[SdpConstraint<T>] {
        &self.constraints
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SdpStatus {
    /// Converged within the accepted duality gap and feasibility budget.
    Optimal,
    /// The iterates certify inconsistency (dual objective diverged);
    /// signals a malformed problem rather than a meaningful optimum.
    Infeasible,
    /// Ran out of iterations before reaching the accepted gap.
    MaxIterations,
}

/// One row of the iteration trace.
#[derive(Clone, Copy, Debug)]
pub struct TracePoint<T> {
    pub iteration: usize,
    pub primal_objective: T,
    pub dual_objective: T,
    pub gap: T,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub variables: Vec<ComplexMatrix<T>>,
    pub objective_value: T,
    pub status: SdpStatus,
    pub duality_gap: T,
    pub iterations: usize,
    /// Filled only when [`SolverOptions::record_trace`] is set.
    pub trace: Vec<TracePoint<T>>,
}

impl<T: Scalar> SdpSolution<T> {
    /// Dump the iteration trace as CSV.
    pub fn write_trace_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "iteration,primal_objective,dual_objective,gap")?;
        for p in &self.trace {
            writeln!(
                w,
                "{},{:e},{:e},{:e}",
                p.iteration, p.primal_objective, p.dual_objective, p.gap
            )?;
        }
        Ok(())
    }
}

/// Interior-point knobs; the defaults are what the rest of the crate uses.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<T> {
    pub max_iterations: usize,
    /// Barrier reduction factor per iteration.
    pub sigma: T,
    /// Fraction-to-boundary step damping.
    pub step_fraction: T,
    /// Duality gap the solver aims for.
    pub gap_target: T,
    /// Largest gap still reported as `Optimal`.
    pub gap_accept: T,
    /// Residual budget for primal and dual feasibility.
    pub feasibility_tol: T,
    /// Objective magnitude treated as divergence (infeasibility).
    pub divergence_bound: T,
    /// Initial variable scale; `None` means `1e-3 / num_vars`.
    pub initial_scale: Option<T>,
    pub record_trace: bool,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            sigma: T::of(0.2),
            step_fraction: T::of(0.98),
            gap_target: tol::floor_eps::<T>(1e-9),
            gap_accept: tol::floor_eps::<T>(1e-7),
            feasibility_tol: tol::floor_eps::<T>(1e-8),
            divergence_bound: T::of(1e8),
            initial_scale: None,
            record_trace: false,
        }
    }
}

/// Solve with default options.
pub fn solve<T: Scalar>(problem: &SdpProblem<T>) -> Result<SdpSolution<T>> {
    solve_with(problem, &SolverOptions::default())
}

/// Solve with explicit options.
pub fn solve_with<T: Scalar>(
    problem: &SdpProblem<T>,
    options: &SolverOptions<T>,
) -> Result<SdpSolution<T>> {
    solver::run(problem, options)
}
