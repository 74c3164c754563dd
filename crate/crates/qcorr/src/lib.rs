//! Correlation structure of noisy two-qubit states.
//!
//! The crate centres on the family `p |phi_q><phi_q| + (1-p)/4 I4` with
//! `|phi_q> = sqrt(1-q)|00> + sqrt(q)|11>`: a partially entangled pure state
//! mixed with white noise. The symmetric point `q = 1/2` is the Werner state.
//! For these states (and arbitrary two-qubit density matrices where the
//! definitions permit) it computes
//!
//! * entanglement: negativity and concurrence ([`entanglement`]),
//! * EPR steering: steerable weights from two- and three-setting
//!   semidefinite programs ([`steering`]), solved by the built-in
//!   interior-point solver ([`sdp`]),
//! * Bell nonlocality: the CHSH violation degree via the two largest
//!   eigenvalues of `T^t T` ([`nonlocality`]),
//! * the noise thresholds at which each correlation appears, the gaps
//!   between thresholds, and where those gaps are widest ([`hierarchy`]),
//! * simulated projective tomography with maximum-likelihood reconstruction
//!   ([`tomography`]).
//!
//! Everything is generic over the floating-point scalar through
//! [`scalar::Scalar`]; concrete `f64` aliases are exported at the crate root
//! and are what the CLI and the test-suite use.
//!
//! # Example
//!
//! ```
//! use qcorr::correlation_report;
//! use qcorr::states::{gws, GwsParams};
//!
//! # fn main() -> qcorr::Result<()> {
//! let rho = gws(GwsParams::new(0.85, 0.1)?);
//! let report = correlation_report(&rho)?;
//! assert!(report.negativity > 0.0);
//! assert!(report.s2 > 0.0 && report.bell == 0.0);
//! assert_eq!(report.regime.id, 4);
//! # Ok(())
//! # }
//! ```

pub mod entanglement;
pub mod hierarchy;
pub mod linalg;
pub mod nonlocality;
pub mod optim;
pub mod random;
pub mod report;
pub mod scalar;
pub mod sdp;
pub mod states;
pub mod steering;
pub mod tol;
pub mod tomography;

pub use linalg::{ComplexMatrix, DensityMatrix};
pub use num_complex::Complex;
pub use report::{correlation_report, CorrelationReport};
pub use scalar::Scalar;
pub use states::GwsParams;

/// `f64` instantiations, the default working precision.
pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type DensityMatrix64 = linalg::DensityMatrix<f64>;
pub type GwsParams64 = states::GwsParams<f64>;
pub type CorrelationReport64 = report::CorrelationReport<f64>;

/// Single-precision aliases, mainly to keep the generic surface honest.
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type DensityMatrix32 = linalg::DensityMatrix<f32>;

/// Crate-wide error type.
///
/// The CLI maps these onto exit codes: state validation failures versus
/// solver/search failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter {name} = {value} outside {expected}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("matrix not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },
    #[error("matrix not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },
    #[error("trace = {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("observable must have eigenvalues -1 and +1, got ({0:.6}, {1:.6})")]
    InvalidObservable(f64, f64),
    #[error("assemblage violates {what} by {dev:.3e}")]
    InvalidAssemblage { what: &'static str, dev: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),
    #[error("SDP did not reach an optimal point: {status:?} after {iterations} iterations (gap {gap:.3e})")]
    SolverFailure {
        status: sdp::SdpStatus,
        iterations: usize,
        gap: f64,
    },
    #[error("no threshold in (0, 1]: {0}")]
    NotFound(String),
    #[error("correlation flags violate the hierarchy: {0}")]
    InconsistentHierarchy(String),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("bad state file: {0}")]
    BadStateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that mean the *input state or parameters* were bad,
    /// as opposed to a numerical procedure failing on valid input.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::ParamOutOfRange { .. }
                | Error::NotHermitian { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::TraceNotOne { .. }
                | Error::NonFinite
                | Error::DimensionMismatch(_)
                | Error::InvalidObservable(..)
                | Error::BadStateFile(_)
                | Error::Degenerate(_)
        )
    }
}
