//! Hermitian eigendecomposition.
//!
//! A Hermitian `H = A + iB` embeds into the real symmetric `2n x 2n` matrix
//! `[[A, -B], [B, A]]`, which a cyclic Jacobi sweep diagonalizes. Every
//! eigenvalue of `H` appears twice in the embedding, and each copy's real
//! eigenplane `span([u; v], [-v; u])` folds back to one complex eigenvector
//! `u + iv`. Degenerate eigenvalues merge those planes, so the fold-back
//! walks eigenvalue clusters and picks a maximal independent set of complex
//! candidates by pivoted Gram-Schmidt; the pivoting keeps every accepted
//! residual of order one, which makes the selection numerically safe.

use super::ComplexMatrix;
use crate::scalar::Scalar;
use crate::tol;
use crate::{Error, Result};
use num_complex::Complex;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and a matrix whose columns are the matching
/// orthonormal eigenvectors.
pub fn eig_hermitian<T: Scalar>(h: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = check_input(h)?;
    let n2 = 2 * n;

    // real symmetric embedding, row-major
    let mut a = vec![T::zero(); n2 * n2];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * n2 + j] = z.re;
            a[i * n2 + (n + j)] = -z.im;
            a[(n + i) * n2 + j] = z.im;
            a[(n + i) * n2 + (n + j)] = z.re;
        }
    }
    let mut v = vec![T::zero(); n2 * n2];
    for i in 0..n2 {
        v[i * n2 + i] = T::one();
    }
    jacobi(&mut a, &mut v, n2);

    // sort eigenpairs ascending
    let mut order: Vec<usize> = (0..n2).collect();
    order.sort_by(|&i, &j| {
        a[i * n2 + i]
            .partial_cmp(&a[j * n2 + j])
            .expect("finite eigenvalues")
    });
    let vals: Vec<T> = order.iter().map(|&k| a[k * n2 + k]).collect();

    let scale = vals[0].abs().max(vals[n2 - 1].abs()).max(T::one());
    let cluster_gap = scale * T::of(1e-10);

    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs = ComplexMatrix::zeros(n, n);
    let mut col = 0usize;

    let mut start = 0usize;
    while start < n2 {
        let mut end = start + 1;
        while end < n2 && vals[end] - vals[end - 1] <= cluster_gap {
            end += 1;
        }
        // each true eigenvalue appears twice; an odd cluster means the gap
        // tolerance split a pair, so pull in the nearest neighbour
        if (end - start) % 2 == 1 {
            if end < n2 {
                end += 1;
            } else {
                return Err(Error::NumericalFailure("eigenvalue pairing in embedding"));
            }
        }

        // complex candidates from the real columns of this cluster
        let mut cands: Vec<Vec<Complex<T>>> = (start..end)
            .map(|k| {
                let c = order[k];
                (0..n)
                    .map(|i| Complex::new(v[i * n2 + c], v[(n + i) * n2 + c]))
                    .collect()
            })
            .collect();

        let take = (end - start) / 2;
        for t in 0..take {
            let (best, best_norm) = cands
                .iter()
                .enumerate()
                .map(|(i, z)| (i, vec_norm(z)))
                .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite norms"))
                .expect("non-empty cluster");
            if best_norm < T::of(0.1) {
                return Err(Error::NumericalFailure("eigenvector extraction collapsed"));
            }
            let mut chosen = cands.swap_remove(best);
            let inv = T::one() / best_norm;
            for z in &mut chosen {
                *z = z.scale(inv);
            }
            for other in &mut cands {
                let overlap = vec_dot(&chosen, other);
                for (o, c) in other.iter_mut().zip(&chosen) {
                    *o -= *c * overlap;
                }
            }
            for i in 0..n {
                out_vecs[(i, col)] = chosen[i];
            }
            out_vals.push((vals[start + 2 * t] + vals[start + 2 * t + 1]) * T::of(0.5));
            col += 1;
        }
        start = end;
    }

    debug_assert!(verify(h, &out_vals, &out_vecs, scale));
    Ok((out_vals, out_vecs))
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian<T: Scalar>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    eig_hermitian(h).map(|(vals, _)| vals)
}

fn check_input<T: Scalar>(h: &ComplexMatrix<T>) -> Result<usize> {
    if !h.is_square() || h.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = h.hermiticity_deviation();
    if dev > tol::floor_eps::<T>(tol::HERMITIAN) * h.max_abs().max(T::one()) {
        return Err(Error::NotHermitian {
            max_dev: dev.as_f64(),
        });
    }
    Ok(h.rows())
}

/// Cyclic Jacobi on a dense real symmetric matrix, diagonal left in `a`,
/// rotations accumulated into the columns of `v`.
fn jacobi<T: Scalar>(a: &mut [T], v: &mut [T], n: usize) {
    let eps = T::epsilon();
    let norm_scale = a
        .iter()
        .map(|&x| x * x)
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt()
        .max(T::one());
    for sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= eps * norm_scale {
            return;
        }
        // annihilation threshold, generous during the first sweeps
        let thresh = if sweep < 3 {
            T::of(0.2) * off / T::of((n * n) as f64)
        } else {
            T::zero()
        };
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = T::of(100.0) * apq.abs();
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                if apq * apq <= thresh {
                    continue;
                }
                let theta = (aqq - app) / (apq + apq);
                let t = {
                    let abs_t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -abs_t
                    } else {
                        abs_t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let tau = s / (T::one() + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_p = arp - s * (arq + tau * arp);
                    let new_q = arq + s * (arp - tau * arq);
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
}

fn vec_norm<T: Scalar>(z: &[Complex<T>]) -> T {
    z.iter()
        .map(|c| c.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// `<a, b>`, conjugate-linear in the first argument.
fn vec_dot<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * *y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

#[cfg(debug_assertions)]
fn verify<T: Scalar>(h: &ComplexMatrix<T>, vals: &[T], vecs: &ComplexMatrix<T>, scale: T) -> bool {
    let n = h.rows();
    let budget = T::of(tol::EIG) * scale;
    // orthonormality
    let gram = &vecs.dagger() * vecs;
    let id = ComplexMatrix::identity(n);
    if gram.max_abs_diff(&id) > budget {
        return false;
    }
    // reconstruction
    let mut rec = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                rec[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj().scale(lam);
            }
        }
    }
    rec.max_abs_diff(h) <= budget
}

#[cfg(not(debug_assertions))]
fn verify<T: Scalar>(_: &ComplexMatrix<T>, _: &[T], _: &ComplexMatrix<T>, _: T) -> bool {
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{chacha, random_hermitian};
    use crate::states::{pauli, PauliAxis};

    fn reconstruct<T: Scalar>(vals: &[T], vecs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = vecs.rows();
        let mut rec = ComplexMatrix::zeros(n, n);
        for (k, &lam) in vals.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    rec[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj().scale(lam);
                }
            }
        }
        rec
    }

    #[test]
    fn random_hermitian_reconstruction_over_one_thousand_trials() {
        for trial in 0..1000u64 {
            let n = 2 + (trial % 4) as usize; // sizes 2..=5
            let h = random_hermitian::<f64>(n, &mut chacha(trial));
            let (vals, vecs) = eig_hermitian(&h).unwrap();
            assert_eq!(vals.len(), n);
            assert!(
                vals.windows(2).all(|w| w[0] <= w[1]),
                "trial {trial}: eigenvalues not ascending"
            );
            let gram = &vecs.dagger() * &vecs;
            assert!(
                gram.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-9,
                "trial {trial}: eigenvectors lost orthonormality"
            );
            assert!(
                reconstruct(&vals, &vecs).max_abs_diff(&h) <= 1e-9,
                "trial {trial}: reconstruction drifted"
            );
        }
    }

    #[test]
    fn pauli_spectra_are_exact() {
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            let vals = eigvals_hermitian(&pauli::<f64>(axis)).unwrap();
            assert!((vals[0] + 1.0).abs() <= 1e-14, "{axis:?}");
            assert!((vals[1] - 1.0).abs() <= 1e-14, "{axis:?}");
        }
    }

    #[test]
    fn degenerate_spectra_still_give_orthonormal_vectors() {
        // identity: fully degenerate
        let (vals, vecs) = eig_hermitian(&ComplexMatrix::<f64>::identity(4)).unwrap();
        assert!(vals.iter().all(|&v| (v - 1.0).abs() <= 1e-12));
        let gram = &vecs.dagger() * &vecs;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-10);

        // doubly degenerate pair hidden by a random unitary conjugation
        let mut rng = chacha(42);
        let u2 = crate::random::random_su2::<f64>(&mut rng);
        let v2 = crate::random::random_su2::<f64>(&mut rng);
        let u = u2.kron(&v2);
        let mut d = ComplexMatrix::<f64>::zeros(4, 4);
        for (k, lam) in [1.0, 1.0, 2.0, 3.0].into_iter().enumerate() {
            d[(k, k)] = Complex::new(lam, 0.0);
        }
        let h = &(&u * &d) * &u.dagger();
        let h = h.hermitian_part();
        let (vals, vecs) = eig_hermitian(&h).unwrap();
        for (got, want) in vals.iter().zip([1.0, 1.0, 2.0, 3.0]) {
            assert!((got - want).abs() <= 1e-10);
        }
        assert!(reconstruct(&vals, &vecs).max_abs_diff(&h) <= 1e-9);
    }

    #[test]
    fn rejects_non_square_non_finite_and_non_hermitian() {
        let rect = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(eig_hermitian(&rect).is_err());

        let mut inf = ComplexMatrix::<f64>::identity(2);
        inf[(0, 0)] = Complex::new(f64::INFINITY, 0.0);
        assert!(matches!(eig_hermitian(&inf), Err(Error::NonFinite)));

        let mut skew = ComplexMatrix::<f64>::identity(2);
        skew[(0, 1)] = Complex::new(0.5, 0.0);
        assert!(matches!(
            eig_hermitian(&skew),
            Err(Error::NotHermitian { .. })
        ));
    }
}
