//! Dense complex matrices, two-qubit partial operations, and the validated
//! density-matrix type.
//!
//! Matrices are small (2x2 up to ~16x16 for solver internals), row-major,
//! and unashamedly allocate; the only allocation-free fast path lives in
//! the SDP solver which has its own fixed-size 2x2 blocks.

mod eig;

pub use eig::{eig_hermitian, eigvals_hermitian};

use crate::scalar::Scalar;
use crate::tol::Tolerances;
use crate::{Error, Result};
use num_complex::Complex;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Which tensor factor of a two-qubit operator an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged or empty row list".into()));
        }
        Ok(ComplexMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Column vector from a slice of amplitudes.
    pub fn ket(amps: &[Complex<T>]) -> Self {
        ComplexMatrix {
            rows: amps.len(),
            cols: 1,
            data: amps.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.map(|z| Complex::new(z.re * s, z.im * s))
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        (0..self.rows)
            .map(|i| self[(i, i)])
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(other.cols, self.rows);
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `max_ij |m_ij - conj(m_ji)|`, zero iff Hermitian.
    pub fn hermiticity_deviation(&self) -> T {
        debug_assert!(self.is_square());
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    /// Kronecker (tensor) product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        Self::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Outer product `self * other^dagger` of two column vectors.
    pub fn outer(&self, other: &Self) -> Self {
        debug_assert!(self.cols == 1 && other.cols == 1);
        Self::from_fn(self.rows, other.rows, |i, j| {
            self[(i, 0)] * other[(j, 0)].conj()
        })
    }
}

impl<T: Scalar> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

// bound kept at `T: Debug` so containers can keep their derived impls
impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:?}{:+?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Transpose one tensor factor of a 4x4 two-qubit operator.
pub fn partial_transpose<T: Scalar>(
    m: &ComplexMatrix<T>,
    subsystem: Subsystem,
) -> Result<ComplexMatrix<T>> {
    check_two_qubit(m)?;
    let out = ComplexMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (ap, bp) = (c / 2, c % 2);
        match subsystem {
            // swap the primed/unprimed index of the chosen factor
            Subsystem::First => m[(2 * ap + b, 2 * a + bp)],
            Subsystem::Second => m[(2 * a + bp, 2 * ap + b)],
        }
    });
    Ok(out)
}

/// Trace out one tensor factor of a 4x4 two-qubit operator, leaving 2x2.
pub fn partial_trace<T: Scalar>(
    m: &ComplexMatrix<T>,
    traced: Subsystem,
) -> Result<ComplexMatrix<T>> {
    check_two_qubit(m)?;
    let out = ComplexMatrix::from_fn(2, 2, |i, j| {
        let mut s = Complex::new(T::zero(), T::zero());
        for k in 0..2 {
            s += match traced {
                Subsystem::First => m[(2 * k + i, 2 * k + j)],
                Subsystem::Second => m[(2 * i + k, 2 * j + k)],
            };
        }
        s
    });
    Ok(out)
}

fn check_two_qubit<T: Scalar>(m: &ComplexMatrix<T>) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "expected 4x4 two-qubit operator, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Principal square root of a Hermitian PSD matrix. Slightly negative
/// eigenvalues (roundoff) are clamped to zero first.
pub fn sqrt_psd<T: Scalar>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (vals, vecs) = eig_hermitian(m)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let s = lam.max(T::zero()).sqrt();
        if s == T::zero() {
            continue;
        }
        for i in 0..n {
            let vi = vecs[(i, k)];
            for j in 0..n {
                out[(i, j)] += vi * vecs[(j, k)].conj().scale(s);
            }
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(a) b sqrt(a)))^2` of two density matrices.
pub fn fidelity<T: Scalar>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    let sa = sqrt_psd(a.matrix())?;
    fidelity_with_sqrt(&sa, b.matrix())
}

/// Fidelity given one side's square root up front; useful when comparing
/// many candidates against a fixed state.
pub fn fidelity_with_sqrt<T: Scalar>(sqrt_a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    let m = &(sqrt_a * b) * sqrt_a;
    // m is Hermitian PSD up to roundoff; symmetrize before decomposing
    let vals = eigvals_hermitian(&m.hermitian_part())?;
    let root_sum: T = vals
        .iter()
        .map(|&lam| lam.max(T::zero()).sqrt())
        .fold(T::zero(), |acc, x| acc + x);
    Ok(root_sum * root_sum)
}

/// Validated two-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Clone, PartialEq, Debug)]
pub struct DensityMatrix<T> {
    mat: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validate with default tolerances.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        Self::new_with(mat, &Tolerances::default())
    }

    /// Validate against explicit tolerances.
    pub fn new_with(mat: ComplexMatrix<T>, tols: &Tolerances<T>) -> Result<Self> {
        if mat.rows() != 4 || mat.cols() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be 4x4, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermiticity_deviation();
        if dev > tols.hermitian {
            return Err(Error::NotHermitian {
                max_dev: dev.as_f64(),
            });
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > tols.unit_trace || tr.im.abs() > tols.unit_trace {
            return Err(Error::TraceNotOne {
                trace: tr.re.as_f64(),
            });
        }
        let vals = eigvals_hermitian(&mat.hermitian_part())?;
        let min_eig = vals[0];
        if min_eig < -tols.psd {
            return Err(Error::NotPositiveSemidefinite {
                min_eig: min_eig.as_f64(),
            });
        }
        Ok(DensityMatrix { mat })
    }

    /// Skip validation; for internal constructors whose output is valid by
    /// construction (convex mixtures of valid states, analytic families).
    pub fn new_unchecked(mat: ComplexMatrix<T>) -> Self {
        debug_assert_eq!((mat.rows(), mat.cols()), (4, 4));
        DensityMatrix { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        eigvals_hermitian(&self.mat.hermitian_part())
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix<T> {
        partial_transpose(&self.mat, subsystem).expect("density matrix is 4x4")
    }

    pub fn partial_trace(&self, traced: Subsystem) -> ComplexMatrix<T> {
        partial_trace(&self.mat, traced).expect("density matrix is 4x4")
    }
}

// JSON form: {"dim": 4, "re": [[...]], "im": [[...]]}, row-major.
impl<T: Scalar> Serialize for DensityMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let grid = |f: fn(&Complex<T>) -> T| -> Vec<Vec<f64>> {
            (0..4)
                .map(|i| (0..4).map(|j| f(&self.mat[(i, j)]).as_f64()).collect())
                .collect()
        };
        let mut st = serializer.serialize_struct("DensityMatrix", 3)?;
        st.serialize_field("dim", &4u32)?;
        st.serialize_field("re", &grid(|z| z.re))?;
        st.serialize_field("im", &grid(|z| z.im))?;
        st.end()
    }
}

impl<'de, T: Scalar> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.dim != 4 {
            return Err(D::Error::custom(format!("dim = {}, expected 4", raw.dim)));
        }
        let shape_ok = |g: &Vec<Vec<f64>>| g.len() == 4 && g.iter().all(|row| row.len() == 4);
        if !shape_ok(&raw.re) || !shape_ok(&raw.im) {
            return Err(D::Error::custom("re/im must be 4x4 nested arrays"));
        }
        let mat = ComplexMatrix::from_fn(4, 4, |i, j| {
            Complex::new(T::of(raw.re[i][j]), T::of(raw.im[i][j]))
        });
        DensityMatrix::new(mat).map_err(|e| D::Error::custom(e.to_string()))
    }
}
