//! CHSH nonlocality through the correlation-matrix criterion: the maximal
//! CHSH expectation of a state is `2 sqrt(M)` with `M` the sum of the two
//! largest eigenvalues of `T^t T`, so `M > 1` marks a violation.

use crate::linalg::{eigvals_hermitian, ComplexMatrix, DensityMatrix};
use crate::scalar::Scalar;
use crate::states::{bloch_decompose, GwsParams};
use crate::{Error, Result};
use num_complex::Complex;

/// Sum of the two largest eigenvalues of `T^t T`, `T` the 3x3 Bloch
/// correlation matrix. In `[0, 3]`; nonlocal iff `> 1`.
pub fn horodecki_m<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let t = bloch_decompose(rho).t;
    let mut u = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut s = T::zero();
            for row in &t {
                s += row[i] * row[j];
            }
            u[(i, j)] = Complex::new(s, T::zero());
        }
    }
    let vals = eigvals_hermitian(&u)?;
    Ok(vals[1] + vals[2])
}

/// Degree of CHSH violation `B = sqrt(max(0, M - 1))`, normalized to
/// `[0, 1]`: zero iff no violation, one for a maximally violating state.
pub fn bell_violation<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let m = horodecki_m(rho)?;
    Ok((m - T::one()).max(T::zero()).sqrt())
}

/// Closed-form violation degree for `gws(p, q)`:
/// `max(0, sqrt(p^2 (1 + 4 q(1-q)) - 1))`.
pub fn gws_bell_violation<T: Scalar>(params: &GwsParams<T>) -> T {
    let x = params.q() * (T::one() - params.q());
    let m = params.p() * params.p() * (T::one() + T::of(4.0) * x);
    (m - T::one()).max(T::zero()).sqrt()
}

/// Noise threshold above which `gws(p, q)` violates CHSH:
/// `p = 1 / sqrt(1 + 4 q(1-q))`.
pub fn bell_threshold<T: Scalar>(q: T) -> Result<T> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(Error::ParamOutOfRange {
            name: "q",
            value: q.as_f64(),
            expected: "[0, 1]",
        });
    }
    let x = q * (T::one() - q);
    Ok(T::one() / (T::one() + T::of(4.0) * x).sqrt())
}
