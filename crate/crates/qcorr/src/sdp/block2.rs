//! Copy-friendly 2x2 Hermitian blocks with closed-form spectral helpers.
//! The interior-point loop runs entirely on these, so nothing here
//! allocates.

use crate::linalg::ComplexMatrix;
use crate::scalar::Scalar;
use num_complex::Complex;
use std::ops::{Add, Neg, Sub};

/// `[[a, z], [conj(z), d]]` with `a`, `d` real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Herm2<T> {
    pub a: T,
    pub d: T,
    pub z: Complex<T>,
}

impl<T: Scalar> Herm2<T> {
    pub fn zero() -> Self {
        Herm2 {
            a: T::zero(),
            d: T::zero(),
            z: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn scaled_identity(s: T) -> Self {
        Herm2 {
            a: s,
            d: s,
            z: Complex::new(T::zero(), T::zero()),
        }
    }

    /// From the real coordinates `(a, d, Re z, Im z)`.
    pub fn from_coords(c: &[T]) -> Self {
        Herm2 {
            a: c[0],
            d: c[1],
            z: Complex::new(c[2], c[3]),
        }
    }

    /// Pairings `<E_t, self>` with the coordinate basis: `(a, d, 2 Re z,
    /// 2 Im z)`.
    pub fn coords(&self) -> [T; 4] {
        [self.a, self.d, self.z.re + self.z.re, self.z.im + self.z.im]
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// `Re tr(self * other)`; the Frobenius pairing of Hermitian blocks.
    pub fn inner(&self, other: &Self) -> T {
        let cross = self.z.re * other.z.re + self.z.im * other.z.im;
        self.a * other.a + self.d * other.d + cross + cross
    }

    pub fn max_abs(&self) -> T {
        self.a.abs().max(self.d.abs()).max(self.z.norm())
    }

    pub fn scale(&self, s: T) -> Self {
        Herm2 {
            a: self.a * s,
            d: self.d * s,
            z: self.z.scale(s),
        }
    }

    /// Eigenvalues, ascending.
    pub fn eigvals(&self) -> (T, T) {
        let half = T::of(0.5);
        let m = (self.a + self.d) * half;
        let dh = (self.a - self.d) * half;
        let r = (dh * dh + self.z.norm_sqr()).sqrt();
        (m - r, m + r)
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
    /// Closed form, with the component choice that avoids cancellation.
    pub fn eig(&self) -> ((T, T), [[Complex<T>; 2]; 2]) {
        let half = T::of(0.5);
        let m = (self.a + self.d) * half;
        let dh = (self.a - self.d) * half;
        let r = (dh * dh + self.z.norm_sqr()).sqrt();
        let vals = (m - r, m + r);

        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let tiny = T::epsilon() * (self.a.abs() + self.d.abs() + self.z.norm());
        let vecs = if self.z.norm() <= tiny {
            if self.a <= self.d {
                [[one, zero], [zero, one]]
            } else {
                [[zero, one], [one, zero]]
            }
        } else {
            // eigenvector for the smaller eigenvalue, large-component form
            let v1 = if dh >= T::zero() {
                [self.z, Complex::new(-(dh + r), T::zero())]
            } else {
                [Complex::new(dh - r, T::zero()), self.z.conj()]
            };
            let norm = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
            let inv = T::one() / norm;
            let v1 = [v1[0].scale(inv), v1[1].scale(inv)];
            let v2 = [-v1[1].conj(), v1[0].conj()];
            [v1, v2]
        };
        (vals, vecs)
    }

    fn spectral_map(&self, f: impl Fn(T) -> T) -> Self {
        let ((l1, l2), v) = self.eig();
        let (s1, s2) = (f(l1), f(l2));
        let a = s1 * v[0][0].norm_sqr() + s2 * v[1][0].norm_sqr();
        let d = s1 * v[0][1].norm_sqr() + s2 * v[1][1].norm_sqr();
        let z = v[0][0] * v[0][1].conj().scale(s1) + v[1][0] * v[1][1].conj().scale(s2);
        Herm2 { a, d, z }
    }

    /// Principal square root; negative roundoff eigenvalues clamp to zero.
    pub fn sqrt(&self) -> Self {
        self.spectral_map(|l| l.max(T::zero()).sqrt())
    }

    /// Inverse square root of a positive definite block.
    pub fn inv_sqrt(&self) -> Self {
        self.spectral_map(|l| T::one() / l.max(T::min_positive_value()).sqrt())
    }

    /// Inverse of a definite block, closed form.
    pub fn inv(&self) -> Self {
        let det = self.a * self.d - self.z.norm_sqr();
        let inv = T::one() / det;
        Herm2 {
            a: self.d * inv,
            d: self.a * inv,
            z: -self.z.scale(inv),
        }
    }

    pub fn to_matrix(self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex::new(self.a, T::zero());
        m[(1, 1)] = Complex::new(self.d, T::zero());
        m[(0, 1)] = self.z;
        m[(1, 0)] = self.z.conj();
        m
    }

    /// Hermitian part of a 2x2 matrix as a block.
    pub fn from_matrix(m: &ComplexMatrix<T>) -> Self {
        let half = T::of(0.5);
        Herm2 {
            a: m[(0, 0)].re,
            d: m[(1, 1)].re,
            z: (m[(0, 1)] + m[(1, 0)].conj()).scale(half),
        }
    }
}

impl<T: Scalar> Add for Herm2<T> {
    type Output = Herm2<T>;
    fn add(self, rhs: Self) -> Self {
        Herm2 {
            a: self.a + rhs.a,
            d: self.d + rhs.d,
            z: self.z + rhs.z,
        }
    }
}

impl<T: Scalar> Sub for Herm2<T> {
    type Output = Herm2<T>;
    fn sub(self, rhs: Self) -> Self {
        Herm2 {
            a: self.a - rhs.a,
            d: self.d - rhs.d,
            z: self.z - rhs.z,
        }
    }
}

impl<T: Scalar> Neg for Herm2<T> {
    type Output = Herm2<T>;
    fn neg(self) -> Self {
        Herm2 {
            a: -self.a,
            d: -self.d,
            z: -self.z,
        }
    }
}

/// Congruence `w m w` of Hermitian blocks, re-hermitized against roundoff.
pub fn congruence<T: Scalar>(w: &Herm2<T>, m: &Herm2<T>) -> Herm2<T> {
    let wa = w.a;
    let wd = w.d;
    let wz = w.z;
    let re = |x: T| Complex::new(x, T::zero());

    // p = w * m
    let p00 = re(wa * m.a) + wz * m.z.conj();
    let p01 = wz.scale(m.d) + re(wa) * m.z;
    let p10 = wz.conj().scale(m.a) + re(wd) * m.z.conj();
    let p11 = re(wd * m.d) + wz.conj() * m.z;

    // q = p * w
    let q00 = p00.scale(wa) + p01 * wz.conj();
    let q01 = p00 * wz + p01.scale(wd);
    let q10 = p10.scale(wa) + p11 * wz.conj();
    let q11 = p10 * wz + p11.scale(wd);

    let half = T::of(0.5);
    Herm2 {
        a: q00.re,
        d: q11.re,
        z: (q01 + q10.conj()).scale(half),
    }
}

/// Largest step `alpha` with `p + alpha dp` still positive semidefinite;
/// `None` when every step keeps it definite.
pub fn max_step<T: Scalar>(p: &Herm2<T>, dp: &Herm2<T>) -> Option<T> {
    let scaled = congruence(&p.inv_sqrt(), dp);
    let (lmin, _) = scaled.eigvals();
    if lmin < T::zero() {
        Some(-T::one() / lmin)
    } else {
        None
    }
}
