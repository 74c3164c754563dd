//! Numerical tolerances, collected in one place.
//!
//! The `f64` defaults below are the reference values; [`Tolerances`] floors
//! each at `100 * T::epsilon()` so that `f32` instantiations stay usable
//! (for `f64` the floor is far below every default and changes nothing).

use crate::scalar::Scalar;

/// Allowed deviation from `m == m^dagger` when validating Hermiticity.
pub const HERMITIAN: f64 = 1e-10;
/// Allowed deviation of a density-matrix trace from 1.
pub const UNIT_TRACE: f64 = 1e-10;
/// How negative an eigenvalue may be before a matrix fails the PSD check.
pub const PSD: f64 = 1e-9;
/// Reconstruction and orthonormality budget for the eigendecomposition.
pub const EIG: f64 = 1e-9;
/// Assemblage consistency budget (no-signalling, positivity, trace).
pub const ASSEMBLAGE: f64 = 1e-9;
/// Below this, negativity and the Bell violation degree count as zero.
pub const MEASURE_ZERO: f64 = 1e-8;
/// Below this, an SDP steerable weight counts as zero.
pub const WEIGHT_ZERO: f64 = 2e-6;

/// Validation tolerances for density-matrix construction.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances<T> {
    pub hermitian: T,
    pub unit_trace: T,
    pub psd: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            hermitian: floor_eps(HERMITIAN),
            unit_trace: floor_eps(UNIT_TRACE),
            psd: floor_eps(PSD),
        }
    }
}

/// `max(x, 100 eps)` in the scalar type.
pub fn floor_eps<T: Scalar>(x: f64) -> T {
    T::of(x).max(T::epsilon() * T::of(100.0))
}
