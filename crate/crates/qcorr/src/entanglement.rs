//! Entanglement measures: negativity and concurrence, with the closed forms
//! and the separability threshold for the noisy partially-entangled family.

use crate::linalg::{eigvals_hermitian, sqrt_psd, ComplexMatrix, DensityMatrix, Subsystem};
use crate::scalar::Scalar;
use crate::states::{pauli, GwsParams, PauliAxis};
use crate::{Error, Result};

/// Negativity `max(0, -2 mu_min)` where `mu_min` is the smallest eigenvalue
/// of the partial transpose. Ranges over `[0, 1]` for two qubits.
pub fn negativity<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let pt = rho.partial_transpose(Subsystem::Second);
    let vals = eigvals_hermitian(&pt.hermitian_part())?;
    Ok((-(vals[0] + vals[0])).max(T::zero()))
}

/// Concurrence `max(0, 2 lambda_max - sum lambda)` with the `lambda` the
/// square roots of the eigenvalues of `rho (Y(x)Y) rho* (Y(x)Y)`.
///
/// Those eigenvalues are computed through the Hermitian similarity
/// `sqrt(rho) (Y(x)Y) rho* (Y(x)Y) sqrt(rho)`, which shares the spectrum.
/// Eigenvalues at roundoff scale are zeroed before the square root: the
/// root would otherwise turn `~eps` noise into `~sqrt(eps)` terms that
/// pollute the subtraction in the formula.
pub fn concurrence<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let yy = pauli::<T>(PauliAxis::Y).kron(&pauli(PauliAxis::Y));
    let spun: ComplexMatrix<T> = &(&yy * &rho.matrix().conj()) * &yy;
    let sr = sqrt_psd(rho.matrix())?;
    let m = &(&sr * &spun) * &sr;
    let vals = eigvals_hermitian(&m.hermitian_part())?;
    let scale = vals.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let floor = scale * T::epsilon() * T::of(100.0);
    let lams: Vec<T> = vals
        .iter()
        .map(|&v| if v <= floor { T::zero() } else { v.sqrt() })
        .collect();
    let (sum, max) = lams
        .iter()
        .fold((T::zero(), T::zero()), |(s, m), &l| (s + l, m.max(l)));
    Ok((max + max - sum).max(T::zero()))
}

/// Closed-form negativity of `gws(p, q)`:
/// `max(0, (p (1 + 4 sqrt(q(1-q))) - 1) / 2)`.
pub fn gws_negativity<T: Scalar>(params: &GwsParams<T>) -> T {
    let half = T::of(0.5);
    let grow = params.p() * (T::one() + T::of(4.0) * params.root_x()) - T::one();
    (grow * half).max(T::zero())
}

/// Noise threshold above which `gws(p, q)` is entangled:
/// `p = 1 / (1 + 4 sqrt(q(1-q)))`.
pub fn negativity_threshold<T: Scalar>(q: T) -> Result<T> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(Error::ParamOutOfRange {
            name: "q",
            value: q.as_f64(),
            expected: "[0, 1]",
        });
    }
    let x = (q * (T::one() - q)).sqrt();
    Ok(T::one() / (T::one() + T::of(4.0) * x))
}
