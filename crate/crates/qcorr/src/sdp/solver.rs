//! Primal-dual Nesterov-Todd path following for the block steering SDP.
//!
//! The max side is written as the linear matrix inequality
//! `Z(y) = F0 - sum_k y_k F_k >= 0` over the stacked coordinates `y` of all
//! variables (4 real coordinates per 2x2 Hermitian block): `Z` carries one
//! block per variable (the variable itself) and one per constraint (its
//! slack). The min side carries a Hermitian multiplier per block. The
//! multiplier start `V_j = 2 I`, `W_i = (2 deg_i - 1) I` is strictly
//! feasible for the min side, so only the max side may start infeasible
//! (shifted `Z`); its residual shrinks by `1 - alpha` per step and the
//! iteration is an infeasible-start method in that one direction.
//!
//! Per iteration: NT scaling per block, Schur complement over the `y`
//! coordinates (at most 32), Cholesky, separate fraction-to-boundary step
//! lengths for the two sides.

use super::block2::{congruence, max_step, Herm2};
use super::{SdpProblem, SdpSolution, SdpStatus, SolverOptions, TracePoint};
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_complex::Complex;

/// Coordinate pairing pattern: the objective counts the two diagonal
/// coordinates of every variable.
const B_PATTERN: [f64; 4] = [1.0, 1.0, 0.0, 0.0];

struct Workspace<T> {
    nv: usize,
    nc: usize,
    constants: Vec<Herm2<T>>,
    members: Vec<Vec<usize>>,
    var_cons: Vec<Vec<usize>>,
}

impl<T: Scalar> Workspace<T> {
    fn new(problem: &SdpProblem<T>) -> Self {
        let nv = problem.num_vars();
        let constraints = problem.constraints();
        let constants = constraints
            .iter()
            .map(|c| Herm2::from_matrix(&c.constant))
            .collect();
        let members: Vec<Vec<usize>> = constraints.iter().map(|c| c.vars.clone()).collect();
        let mut var_cons = vec![Vec::new(); nv];
        for (j, vars) in members.iter().enumerate() {
            for &i in vars {
                var_cons[i].push(j);
            }
        }
        Workspace {
            nv,
            nc: constraints.len(),
            constants,
            members,
            var_cons,
        }
    }

    fn blocks(&self) -> usize {
        self.nv + self.nc
    }
}

pub fn run<T: Scalar>(
    problem: &SdpProblem<T>,
    options: &SolverOptions<T>,
) -> Result<SdpSolution<T>> {
    let ws = Workspace::new(problem);
    let (nv, nb) = (ws.nv, ws.blocks());
    let ncoord = 4 * nv;
    let barrier_dim = T::of((2 * nb) as f64);

    let eps = options
        .initial_scale
        .unwrap_or_else(|| T::of(1e-3) / T::of(nv as f64));

    // max-side: variables eps*I, slacks shifted into the cone if needed
    let mut y = vec![T::zero(); ncoord];
    for i in 0..nv {
        y[4 * i] = eps;
        y[4 * i + 1] = eps;
    }
    let mut zb: Vec<Herm2<T>> = Vec::with_capacity(nb);
    for _ in 0..nv {
        zb.push(Herm2::scaled_identity(eps));
    }
    for j in 0..ws.nc {
        let occupancy = T::of(ws.members[j].len() as f64);
        let slack = ws.constants[j] - Herm2::scaled_identity(eps * occupancy);
        let (lmin, _) = slack.eigvals();
        let floor = T::of(1e-3) * ws.constants[j].max_abs().max(T::one());
        let shifted = if lmin < floor {
            // infeasible start: the shift becomes a dual residual that the
            // iteration drives back to zero
            slack + Herm2::scaled_identity(floor - lmin)
        } else {
            slack
        };
        zb.push(shifted);
    }

    // min-side multipliers: strictly feasible by construction
    let mut sb: Vec<Herm2<T>> = Vec::with_capacity(nb);
    for i in 0..nv {
        let deg = T::of(ws.var_cons[i].len() as f64);
        sb.push(Herm2::scaled_identity(deg + deg - T::one()));
    }
    for _ in 0..ws.nc {
        sb.push(Herm2::scaled_identity(T::of(2.0)));
    }

    let bvec: [T; 4] = [
        T::of(B_PATTERN[0]),
        T::of(B_PATTERN[1]),
        T::of(B_PATTERN[2]),
        T::of(B_PATTERN[3]),
    ];

    let mut trace = Vec::new();
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0usize;
    let mut stalled = 0usize;

    let mut rd = vec![Herm2::zero(); nb];
    let mut dz = vec![Herm2::zero(); nb];
    let mut ds = vec![Herm2::zero(); nb];
    let mut zinv = vec![Herm2::zero(); nb];
    let mut w = vec![Herm2::zero(); nb];
    let mut wrw = vec![Herm2::zero(); nb];
    let mut smat = vec![[[T::zero(); 4]; 4]; nb];
    let mut m = vec![T::zero(); ncoord * ncoord];
    let mut rhs = vec![T::zero(); ncoord];

    for iter in 0..options.max_iterations {
        // residuals and merit quantities
        let xs: Vec<Herm2<T>> = (0..nv)
            .map(|i| Herm2::from_coords(&y[4 * i..4 * i + 4]))
            .collect();
        for i in 0..nv {
            rd[i] = xs[i] - zb[i];
        }
        for j in 0..ws.nc {
            let mut r = ws.constants[j] - zb[nv + j];
            for &i in &ws.members[j] {
                r = r - xs[i];
            }
            rd[nv + j] = r;
        }
        let rd_max = rd
            .iter()
            .map(|b| b.max_abs())
            .fold(T::zero(), |a, b| a.max(b));

        let mut rp_max = T::zero();
        for i in 0..nv {
            let own = sb[i].coords();
            let mut agg = [T::zero(); 4];
            for &j in &ws.var_cons[i] {
                let c = sb[nv + j].coords();
                for t in 0..4 {
                    agg[t] += c[t];
                }
            }
            for t in 0..4 {
                rp_max = rp_max.max((bvec[t] - (agg[t] - own[t])).abs());
            }
        }

        let gap: T = (0..nb)
            .map(|b| sb[b].inner(&zb[b]))
            .fold(T::zero(), |a, b| a + b);
        let pobj: T = xs.iter().map(Herm2::trace).fold(T::zero(), |a, b| a + b);
        let dobj: T = (0..ws.nc)
            .map(|j| ws.constants[j].inner(&sb[nv + j]))
            .fold(T::zero(), |a, b| a + b);

        if options.record_trace {
            trace.push(TracePoint {
                iteration: iter,
                primal_objective: pobj,
                dual_objective: dobj,
                gap,
            });
        }

        if gap.abs() <= options.gap_target
            && rd_max <= options.feasibility_tol
            && rp_max <= options.feasibility_tol
        {
            status = SdpStatus::Optimal;
            break;
        }
        if pobj.abs() > options.divergence_bound || dobj.abs() > options.divergence_bound {
            status = SdpStatus::Infeasible;
            break;
        }

        let mu = gap / barrier_dim;
        let sigma_mu = options.sigma * mu;

        // NT scaling per block: w z w = s
        for b in 0..nb {
            zinv[b] = zb[b].inv();
            let zs = zb[b].sqrt();
            let zis = zb[b].inv_sqrt();
            let mid = congruence(&zs, &sb[b]);
            w[b] = congruence(&zis, &mid.sqrt());
            wrw[b] = congruence(&w[b], &rd[b]);
            for (t, col) in smat[b].iter_mut().enumerate() {
                let image = congruence(&w[b], &basis(t));
                *col = image.coords();
            }
        }

        // Schur matrix over y coordinates and its right-hand side
        m.iter_mut().for_each(|v| *v = T::zero());
        for i in 0..nv {
            for t in 0..4 {
                for u in 0..4 {
                    m[(4 * i + t) * ncoord + (4 * i + u)] += smat[i][u][t];
                }
            }
        }
        for j in 0..ws.nc {
            let b = nv + j;
            for &i1 in &ws.members[j] {
                for &i2 in &ws.members[j] {
                    for t in 0..4 {
                        for u in 0..4 {
                            m[(4 * i1 + t) * ncoord + (4 * i2 + u)] += smat[b][u][t];
                        }
                    }
                }
            }
        }
        for i in 0..nv {
            let own_wrw = wrw[i].coords();
            let own_zi = zinv[i].coords();
            for t in 0..4 {
                let mut v = bvec[t] - own_wrw[t] + sigma_mu * own_zi[t];
                for &j in &ws.var_cons[i] {
                    let c_wrw = wrw[nv + j].coords();
                    let c_zi = zinv[nv + j].coords();
                    v += c_wrw[t] - sigma_mu * c_zi[t];
                }
                rhs[4 * i + t] = v;
            }
        }

        let dy = cholesky_solve(&m, ncoord, &rhs)
            .ok_or(Error::NumericalFailure("Schur system lost definiteness"))?;

        // direction blocks
        for i in 0..nv {
            dz[i] = rd[i] + Herm2::from_coords(&dy[4 * i..4 * i + 4]);
        }
        for j in 0..ws.nc {
            let mut d = rd[nv + j];
            for &i in &ws.members[j] {
                d = d - Herm2::from_coords(&dy[4 * i..4 * i + 4]);
            }
            dz[nv + j] = d;
        }
        for b in 0..nb {
            ds[b] = zinv[b].scale(sigma_mu) - sb[b] - congruence(&w[b], &dz[b]);
        }

        // fraction-to-boundary steps, separate per side
        let mut alpha_z = T::one();
        let mut alpha_s = T::one();
        for b in 0..nb {
            if let Some(step) = max_step(&zb[b], &dz[b]) {
                alpha_z = alpha_z.min(options.step_fraction * step);
            }
            if let Some(step) = max_step(&sb[b], &ds[b]) {
                alpha_s = alpha_s.min(options.step_fraction * step);
            }
        }

        for k in 0..ncoord {
            y[k] += alpha_z * dy[k];
        }
        for b in 0..nb {
            zb[b] = zb[b] + dz[b].scale(alpha_z);
            sb[b] = sb[b] + ds[b].scale(alpha_s);
        }
        iterations = iter + 1;

        if alpha_z.max(alpha_s) < T::of(1e-10) {
            stalled += 1;
            if stalled >= 8 {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    // final stats for the verdict and the report
    let xs: Vec<Herm2<T>> = (0..nv)
        .map(|i| Herm2::from_coords(&y[4 * i..4 * i + 4]))
        .collect();
    let gap: T = (0..nb)
        .map(|b| sb[b].inner(&zb[b]))
        .fold(T::zero(), |a, b| a + b);
    let pobj: T = xs.iter().map(Herm2::trace).fold(T::zero(), |a, b| a + b);
    if status == SdpStatus::MaxIterations && gap.abs() <= options.gap_accept {
        let mut rd_max = T::zero();
        for i in 0..nv {
            rd_max = rd_max.max((xs[i] - zb[i]).max_abs());
        }
        for j in 0..ws.nc {
            let mut r = ws.constants[j] - zb[nv + j];
            for &i in &ws.members[j] {
                r = r - xs[i];
            }
            rd_max = rd_max.max(r.max_abs());
        }
        if rd_max <= options.feasibility_tol {
            status = SdpStatus::Optimal;
        }
    }

    Ok(SdpSolution {
        variables: xs.iter().map(|x| x.to_matrix()).collect(),
        objective_value: pobj,
        status,
        duality_gap: gap.abs(),
        iterations,
        trace,
    })
}

fn basis<T: Scalar>(t: usize) -> Herm2<T> {
    let (o, l) = (T::zero(), T::one());
    match t {
        0 => Herm2 {
            a: l,
            d: o,
            z: Complex::new(o, o),
        },
        1 => Herm2 {
            a: o,
            d: l,
            z: Complex::new(o, o),
        },
        2 => Herm2 {
            a: o,
            d: o,
            z: Complex::new(l, o),
        },
        _ => Herm2 {
            a: o,
            d: o,
            z: Complex::new(o, l),
        },
    }
}

/// Dense Cholesky solve of the (symmetric positive definite) Schur system.
fn cholesky_solve<T: Scalar>(m: &[T], n: usize, rhs: &[T]) -> Option<Vec<T>> {
    let mut l = m.to_vec();
    // tiny diagonal lift keeps the factorization alive near convergence
    let jitter = l
        .iter()
        .step_by(n + 1)
        .fold(T::zero(), |a, &b| a.max(b.abs()))
        * T::epsilon()
        * T::of(100.0);
    for k in 0..n {
        l[k * n + k] += jitter;
    }
    for k in 0..n {
        let mut diag = l[k * n + k];
        for s in 0..k {
            diag -= l[k * n + s] * l[k * n + s];
        }
        if diag <= T::zero() {
            return None;
        }
        let dk = diag.sqrt();
        l[k * n + k] = dk;
        for i in (k + 1)..n {
            let mut v = l[i * n + k];
            for s in 0..k {
                v -= l[i * n + s] * l[k * n + s];
            }
            l[i * n + k] = v / dk;
        }
    }
    let mut x = rhs.to_vec();
    for i in 0..n {
        let mut v = x[i];
        for s in 0..i {
            v -= l[i * n + s] * x[s];
        }
        x[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = x[i];
        for s in (i + 1)..n {
            v -= l[s * n + i] * x[s];
        }
        x[i] = v / l[i * n + i];
    }
    Some(x)
}
