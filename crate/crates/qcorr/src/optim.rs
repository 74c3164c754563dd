//! Derivative-free maximizers used by the threshold searches and the
//! parameter fits: golden-section on an interval and a small Nelder-Mead
//! simplex. Both are deterministic.

use crate::scalar::Scalar;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)` once the bracket is narrower than `tol`.
pub fn golden_section_max<T: Scalar>(
    mut f: impl FnMut(T) -> T,
    mut lo: T,
    mut hi: T,
    tol: T,
) -> (T, T) {
    let inv_phi = T::of(0.618_033_988_749_894_9);
    let mut a = hi - (hi - lo) * inv_phi;
    let mut b = lo + (hi - lo) * inv_phi;
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * inv_phi;
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * inv_phi;
            fb = f(b);
        }
    }
    let mid = (lo + hi) * T::of(0.5);
    let fm = f(mid);
    if fm >= fa && fm >= fb {
        (mid, fm)
    } else if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Nelder-Mead maximization from `start` with initial step `scale` per
/// coordinate, stopping after `max_evals` objective evaluations. Returns
/// the best point and value seen.
pub fn nelder_mead_max<T: Scalar>(
    mut f: impl FnMut(&[T]) -> T,
    start: &[T],
    scale: T,
    max_evals: usize,
) -> (Vec<T>, T) {
    let dim = start.len();
    let (alpha, gamma, beta, delta) = (T::of(1.0), T::of(2.0), T::of(0.5), T::of(0.5));
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    let v0 = start.to_vec();
    let fv0 = eval(&v0, &mut evals);
    simplex.push((v0, fv0));
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += scale;
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    while evals < max_evals {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite objective"));
        let centroid: Vec<T> = (0..dim)
            .map(|i| {
                simplex[..dim]
                    .iter()
                    .map(|(v, _)| v[i])
                    .fold(T::zero(), |a, b| a + b)
                    / T::of(dim as f64)
            })
            .collect();
        let worst = simplex[dim].clone();
        let lerp = |from: &[T], towards: &[T], t: T| -> Vec<T> {
            (0..dim)
                .map(|i| from[i] + (towards[i] - from[i]) * t)
                .collect()
        };

        let reflected = lerp(&worst.0, &centroid, T::one() + alpha);
        let fr = eval(&reflected, &mut evals);
        if fr > simplex[0].1 {
            let expanded = lerp(&worst.0, &centroid, T::one() + gamma);
            let fe = eval(&expanded, &mut evals);
            simplex[dim] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr > simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = lerp(&worst.0, &centroid, T::one() - beta);
            let fc = eval(&contracted, &mut evals);
            if fc > worst.1 {
                simplex[dim] = (contracted, fc);
            } else {
                // shrink towards the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk = lerp(&entry.0, &best, delta);
                    let fs = eval(&shrunk, &mut evals);
                    *entry = (shrunk, fs);
                }
            }
        }
    }

    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite objective"));
    simplex.swap_remove(0)
}
