//! Seeded random states and unitaries, used by property tests and the
//! measurement-direction search. ChaCha8 keeps every draw reproducible
//! across platforms.

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::scalar::Scalar;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The deterministic generator used throughout the crate.
pub fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Name of the RNG algorithm, recorded in simulation metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

fn unit<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    T::of(rng.gen::<f64>())
}

fn symmetric_unit<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    T::of(2.0 * rng.gen::<f64>() - 1.0)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<T: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex::new(symmetric_unit(rng), T::zero());
        for j in (i + 1)..n {
            let z = Complex::new(symmetric_unit(rng), symmetric_unit(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random density matrix `G G^dagger / tr` with Gaussian-free (uniform)
/// Ginibre-style entries; full rank with probability one.
pub fn random_density<T: Scalar>(rng: &mut ChaCha8Rng) -> DensityMatrix<T> {
    let g = ComplexMatrix::from_fn(4, 4, |_, _| {
        Complex::new(symmetric_unit(rng), symmetric_unit(rng))
    });
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    DensityMatrix::new_unchecked(gg.scale_re(T::one() / tr))
}

/// Random pure product state `|a><a| (x) |b><b|`.
pub fn random_product_density<T: Scalar>(rng: &mut ChaCha8Rng) -> DensityMatrix<T> {
    let ka = random_qubit_ket(rng);
    let kb = random_qubit_ket(rng);
    let k = ka.kron(&kb);
    DensityMatrix::new_unchecked(k.outer(&k))
}

fn random_qubit_ket<T: Scalar>(rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let theta: T = unit::<T>(rng) * T::PI();
    let phi: T = unit::<T>(rng) * T::of(2.0 * std::f64::consts::PI);
    let half = T::of(0.5);
    ComplexMatrix::ket(&[
        Complex::new((theta * half).cos(), T::zero()),
        Complex::from_polar((theta * half).sin(), phi),
    ])
}

/// Random SU(2) element from uniform Euler angles.
pub fn random_su2<T: Scalar>(rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let two_pi = T::of(2.0 * std::f64::consts::PI);
    euler_su2(
        unit::<T>(rng) * two_pi,
        unit::<T>(rng) * T::PI(),
        unit::<T>(rng) * two_pi,
    )
}

/// `Rz(alpha) Ry(beta) Rz(gamma)`.
pub fn euler_su2<T: Scalar>(alpha: T, beta: T, gamma: T) -> ComplexMatrix<T> {
    let half = T::of(0.5);
    let (cb, sb) = ((beta * half).cos(), (beta * half).sin());
    let phase = |t: T| Complex::from_polar(T::one(), t);
    // rows of Rz(a) Ry(b) Rz(g) written out

    ComplexMatrix::from_rows(&[
        vec![
            phase(-(alpha + gamma) * half).scale(cb),
            -phase(-(alpha - gamma) * half).scale(sb),
        ],
        vec![
            phase((alpha - gamma) * half).scale(sb),
            phase((alpha + gamma) * half).scale(cb),
        ],
    ])
    .expect("fixed 2x2 shape")
}
