//! Two-qubit state constructors and parameterizations.
//!
//! The central family is `gws(p, q) = p |phi_q><phi_q| + (1-p)/4 I4` with
//! `|phi_q> = sqrt(1-q)|00> + sqrt(q)|11>` (real positive amplitudes):
//! a partially entangled state mixed with white noise. `werner(p)` is the
//! `q = 1/2` point. Also here: the Bloch (Pauli) decomposition, the general
//! X-shaped density matrix, and the count-rate ratios that characterize how
//! such states show up in a two-photon experiment.

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_complex::Complex;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Measurement axis; doubles as the index set for Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

pub const PAULI_AXES: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

/// The 2x2 Pauli matrix for an axis.
pub fn pauli<T: Scalar>(axis: PauliAxis) -> ComplexMatrix<T> {
    let (o, l) = (T::zero(), T::one());
    let mut m = ComplexMatrix::zeros(2, 2);
    match axis {
        PauliAxis::X => {
            m[(0, 1)] = Complex::new(l, o);
            m[(1, 0)] = Complex::new(l, o);
        }
        PauliAxis::Y => {
            m[(0, 1)] = Complex::new(o, -l);
            m[(1, 0)] = Complex::new(o, l);
        }
        PauliAxis::Z => {
            m[(0, 0)] = Complex::new(l, o);
            m[(1, 1)] = Complex::new(-l, o);
        }
    }
    m
}

fn ket2<T: Scalar>(a: Complex<T>, b: Complex<T>) -> ComplexMatrix<T> {
    ComplexMatrix::ket(&[a, b])
}

pub fn ket0<T: Scalar>() -> ComplexMatrix<T> {
    ket2(
        Complex::new(T::one(), T::zero()),
        Complex::new(T::zero(), T::zero()),
    )
}

pub fn ket1<T: Scalar>() -> ComplexMatrix<T> {
    ket2(
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::one(), T::zero()),
    )
}

pub fn ket_plus<T: Scalar>() -> ComplexMatrix<T> {
    let r = T::of(std::f64::consts::FRAC_1_SQRT_2);
    ket2(Complex::new(r, T::zero()), Complex::new(r, T::zero()))
}

pub fn ket_minus<T: Scalar>() -> ComplexMatrix<T> {
    let r = T::of(std::f64::consts::FRAC_1_SQRT_2);
    ket2(Complex::new(r, T::zero()), Complex::new(-r, T::zero()))
}

/// `(|0> + i|1>)/sqrt(2)`, the +1 eigenvector of Pauli Y.
pub fn ket_right<T: Scalar>() -> ComplexMatrix<T> {
    let r = T::of(std::f64::consts::FRAC_1_SQRT_2);
    ket2(Complex::new(r, T::zero()), Complex::new(T::zero(), r))
}

/// `(|0> - i|1>)/sqrt(2)`, the -1 eigenvector of Pauli Y.
pub fn ket_left<T: Scalar>() -> ComplexMatrix<T> {
    let r = T::of(std::f64::consts::FRAC_1_SQRT_2);
    ket2(Complex::new(r, T::zero()), Complex::new(T::zero(), -r))
}

/// Parameters of the noisy partially-entangled family: purity weight `p`
/// and amplitude split `q`, both in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GwsParams<T> {
    p: T,
    q: T,
}

impl<T: Scalar> GwsParams<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        check_unit_interval("p", p)?;
        check_unit_interval("q", q)?;
        Ok(GwsParams { p, q })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// `sqrt(q (1 - q))`, the product amplitude that controls the corner
    /// coherence.
    pub fn root_x(&self) -> T {
        (self.q * (T::one() - self.q)).sqrt()
    }

    /// The equivalent X-state parameters of `gws(p, q)`.
    pub fn x_state_params(&self) -> XStateParams<T> {
        let quarter = T::of(0.25);
        let noise = (T::one() - self.p) * quarter;
        XStateParams {
            a: self.p * (T::one() - self.q) + noise,
            b: noise,
            c: noise,
            d: self.p * self.q + noise,
            e: Complex::new(self.p * self.root_x(), T::zero()),
            f: Complex::new(T::zero(), T::zero()),
        }
    }
}

impl<T: Scalar> Serialize for GwsParams<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("GwsParams", 2)?;
        st.serialize_field("p", &self.p.as_f64())?;
        st.serialize_field("q", &self.q.as_f64())?;
        st.end()
    }
}

fn check_unit_interval<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if !(v >= T::zero() && v <= T::one()) {
        return Err(Error::ParamOutOfRange {
            name,
            value: v.as_f64(),
            expected: "[0, 1]",
        });
    }
    Ok(())
}

/// `p |phi_q><phi_q| + (1-p)/4 I4`.
pub fn gws<T: Scalar>(params: GwsParams<T>) -> DensityMatrix<T> {
    let (o, p) = (T::zero(), params.p());
    let phi = ComplexMatrix::ket(&[
        Complex::new((T::one() - params.q()).sqrt(), o),
        Complex::new(o, o),
        Complex::new(o, o),
        Complex::new(params.q().sqrt(), o),
    ]);
    let pure = phi.outer(&phi);
    let noise = ComplexMatrix::identity(4).scale_re((T::one() - p) * T::of(0.25));
    DensityMatrix::new_unchecked(&pure.scale_re(p) + &noise)
}

/// Werner state: the maximally entangled point `q = 1/2` of [`gws`].
pub fn werner<T: Scalar>(p: T) -> Result<DensityMatrix<T>> {
    Ok(gws(GwsParams::new(p, T::of(0.5))?))
}

/// Convex mixture `w a + (1-w) b`.
pub fn mix<T: Scalar>(
    a: &DensityMatrix<T>,
    b: &DensityMatrix<T>,
    w: T,
) -> Result<DensityMatrix<T>> {
    check_unit_interval("w", w)?;
    let m = &a.matrix().scale_re(w) + &b.matrix().scale_re(T::one() - w);
    Ok(DensityMatrix::new_unchecked(m))
}

/// Pauli decomposition of a two-qubit state: local Bloch vectors and the
/// 3x3 correlation matrix `t[i][j] = tr[rho (sigma_i (x) sigma_j)]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochForm<T> {
    pub x: [T; 3],
    pub y: [T; 3],
    pub t: [[T; 3]; 3],
}

pub fn bloch_decompose<T: Scalar>(rho: &DensityMatrix<T>) -> BlochForm<T> {
    let id2 = ComplexMatrix::identity(2);
    let sig: Vec<ComplexMatrix<T>> = PAULI_AXES.iter().map(|&ax| pauli(ax)).collect();
    let expect = |op: &ComplexMatrix<T>| (op * rho.matrix()).trace().re;
    let mut form = BlochForm {
        x: [T::zero(); 3],
        y: [T::zero(); 3],
        t: [[T::zero(); 3]; 3],
    };
    for i in 0..3 {
        form.x[i] = expect(&sig[i].kron(&id2));
        form.y[i] = expect(&id2.kron(&sig[i]));
        for j in 0..3 {
            form.t[i][j] = expect(&sig[i].kron(&sig[j]));
        }
    }
    form
}

impl<T: Scalar> BlochForm<T> {
    /// Reassemble `1/4 (I + x.sigma (x) I + I (x) y.sigma + sum t_ij
    /// sigma_i (x) sigma_j)`; inverse of [`bloch_decompose`] for valid input.
    pub fn assemble(&self) -> ComplexMatrix<T> {
        let id2 = ComplexMatrix::identity(2);
        let sig: Vec<ComplexMatrix<T>> = PAULI_AXES.iter().map(|&ax| pauli(ax)).collect();
        let mut m = ComplexMatrix::identity(4);
        for i in 0..3 {
            m = &m + &sig[i].kron(&id2).scale_re(self.x[i]);
            m = &m + &id2.kron(&sig[i]).scale_re(self.y[i]);
            for j in 0..3 {
                m = &m + &sig[i].kron(&sig[j]).scale_re(self.t[i][j]);
            }
        }
        m.scale_re(T::of(0.25))
    }
}

/// Entries of an X-shaped density matrix: diagonal `a, b, c, d` and the
/// anti-diagonal coherences `e` (outer block) and `f` (inner block).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XStateParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: Complex<T>,
    pub f: Complex<T>,
}

/// Build the X-state
/// `[[a, 0, 0, e], [0, b, f, 0], [0, f*, c, 0], [e*, 0, 0, d]]`.
pub fn x_state<T: Scalar>(params: &XStateParams<T>) -> Result<DensityMatrix<T>> {
    let tol = crate::tol::floor_eps::<T>(crate::tol::UNIT_TRACE);
    let XStateParams { a, b, c, d, e, f } = *params;
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
        if !(v >= T::zero() && v.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name,
                value: v.as_f64(),
                expected: "[0, inf)",
            });
        }
    }
    let trace = a + b + c + d;
    if (trace - T::one()).abs() > tol {
        return Err(Error::TraceNotOne {
            trace: trace.as_f64(),
        });
    }
    // PSD for the X shape reduces to the two 2x2 anti-diagonal blocks
    if e.norm() > (a * d).sqrt() + tol {
        return Err(Error::NotPositiveSemidefinite {
            min_eig: (((a + d) * T::of(0.5))
                - (((a - d) * T::of(0.5)).powi(2) + e.norm_sqr()).sqrt())
            .as_f64(),
        });
    }
    if f.norm() > (b * c).sqrt() + tol {
        return Err(Error::NotPositiveSemidefinite {
            min_eig: (((b + c) * T::of(0.5))
                - (((b - c) * T::of(0.5)).powi(2) + f.norm_sqr()).sqrt())
            .as_f64(),
        });
    }
    let o = T::zero();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = Complex::new(a, o);
    m[(1, 1)] = Complex::new(b, o);
    m[(2, 2)] = Complex::new(c, o);
    m[(3, 3)] = Complex::new(d, o);
    m[(0, 3)] = e;
    m[(3, 0)] = e.conj();
    m[(1, 2)] = f;
    m[(2, 1)] = f.conj();
    Ok(DensityMatrix::new_unchecked(m))
}

/// Count-rate ratios a two-photon setup would record for `gws(p, q)`:
/// coincidence ratio of the outer diagonal entries, interference visibility
/// of the corner coherence, and the ratio against the noise floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SetupRatios<T> {
    pub r_ad: T,
    pub visibility: T,
    pub r_ab: T,
}

pub fn setup_ratios<T: Scalar>(params: &GwsParams<T>) -> Result<SetupRatios<T>> {
    let (p, q) = (params.p(), params.q());
    let one = T::one();
    let four = T::of(4.0);
    let num = four * p * q + one - p;
    let den_ad = four * p * (one - q) + one - p;
    if den_ad == T::zero() {
        return Err(Error::DivisionByZero("r_ad at p = 1, q = 1"));
    }
    if p >= one {
        return Err(Error::DivisionByZero("r_ab at p = 1"));
    }
    let xp = params.x_state_params();
    Ok(SetupRatios {
        r_ad: num / den_ad,
        visibility: (xp.e.re + xp.e.re) / (xp.a + xp.d),
        r_ab: num / (one - p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{chacha, random_density};

    fn params(p: f64, q: f64) -> GwsParams<f64> {
        GwsParams::new(p, q).unwrap()
    }

    #[test]
    fn pauli_algebra_holds() {
        let id = ComplexMatrix::<f64>::identity(2);
        for axis in PAULI_AXES {
            let s = pauli::<f64>(axis);
            assert!(s.hermiticity_deviation() <= 1e-15);
            assert!((&s * &s).max_abs_diff(&id) <= 1e-15, "{axis:?}^2 != I");
            assert!(s.trace().norm() <= 1e-15, "{axis:?} not traceless");
        }
        // XY = iZ
        let xy = &pauli::<f64>(PauliAxis::X) * &pauli(PauliAxis::Y);
        let iz = pauli::<f64>(PauliAxis::Z).scale(Complex::new(0.0, 1.0));
        assert!(xy.max_abs_diff(&iz) <= 1e-15);
    }

    #[test]
    fn kets_are_pauli_eigenvectors() {
        let checks = [
            (pauli::<f64>(PauliAxis::Z), ket0::<f64>(), 1.0),
            (pauli::<f64>(PauliAxis::Z), ket1::<f64>(), -1.0),
            (pauli::<f64>(PauliAxis::X), ket_plus::<f64>(), 1.0),
            (pauli::<f64>(PauliAxis::X), ket_minus::<f64>(), -1.0),
            (pauli::<f64>(PauliAxis::Y), ket_right::<f64>(), 1.0),
            (pauli::<f64>(PauliAxis::Y), ket_left::<f64>(), -1.0),
        ];
        for (op, ket, sign) in checks {
            let applied = &op * &ket;
            assert!(applied.max_abs_diff(&ket.scale_re(sign)) <= 1e-15);
            let norm = ket.dagger().trace_product(&ket).re;
            assert!((norm - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn werner_matrix_entries() {
        let rho = werner(0.6f64).unwrap();
        let m = rho.matrix();
        for (i, j, want) in [
            (0, 0, 0.4),
            (1, 1, 0.1),
            (2, 2, 0.1),
            (3, 3, 0.4),
            (0, 3, 0.3),
            (3, 0, 0.3),
        ] {
            assert!((m[(i, j)].re - want).abs() <= 1e-15, "entry ({i},{j})");
            assert!(m[(i, j)].im.abs() <= 1e-15);
        }
        assert!((m[(1, 2)].norm()) <= 1e-15);

        let mixed = werner(0.0f64).unwrap();
        let quarter = ComplexMatrix::<f64>::identity(4).scale_re(0.25);
        assert!(mixed.matrix().max_abs_diff(&quarter) <= 1e-15);
    }

    #[test]
    fn param_validation_rejects_out_of_range() {
        assert!(GwsParams::new(-0.1f64, 0.5).is_err());
        assert!(GwsParams::new(1.5f64, 0.5).is_err());
        assert!(GwsParams::new(0.5f64, f64::NAN).is_err());
        assert!(werner(2.0f64).is_err());
    }

    #[test]
    fn gws_params_serialize_as_plain_fields() {
        let text = serde_json::to_string(&params(0.8, 0.1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["p"], 0.8);
        assert_eq!(v["q"], 0.1);
    }

    #[test]
    fn bloch_form_of_pure_asymmetric_state() {
        let form = bloch_decompose(&gws(params(1.0, 0.1)));
        for i in 0..2 {
            assert!(form.x[i].abs() <= 1e-12);
            assert!(form.y[i].abs() <= 1e-12);
        }
        assert!((form.x[2] - 0.8).abs() <= 1e-12);
        assert!((form.y[2] - 0.8).abs() <= 1e-12);
        let expected_t = [[0.6, 0.0, 0.0], [0.0, -0.6, 0.0], [0.0, 0.0, 1.0]];
        for (i, row) in expected_t.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                assert!((form.t[i][j] - want).abs() <= 1e-12, "t[{i}][{j}]");
            }
        }
    }

    #[test]
    fn bloch_round_trip_on_random_states() {
        for seed in 0..25u64 {
            let rho = random_density::<f64>(&mut chacha(seed));
            let back = bloch_decompose(&rho).assemble();
            assert!(back.max_abs_diff(rho.matrix()) <= 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn mix_is_associative_when_weights_agree() {
        let mut rng = chacha(31);
        let a = random_density::<f64>(&mut rng);
        let b = random_density::<f64>(&mut rng);
        let c = random_density::<f64>(&mut rng);
        let (u, v) = (0.3f64, 0.6f64);
        // both groupings realize weights (uv, (1-u)v, 1-v)
        let left = mix(&mix(&a, &b, u).unwrap(), &c, v).unwrap();
        let t = u * v;
        let s = ((1.0 - u) * v) / (1.0 - t);
        let right = mix(&a, &mix(&b, &c, s).unwrap(), t).unwrap();
        assert!(left.matrix().max_abs_diff(right.matrix()) <= 1e-10);
    }

    #[test]
    fn mix_validates_the_weight() {
        let a = werner(0.3f64).unwrap();
        let b = werner(0.7f64).unwrap();
        assert!(mix(&a, &b, 1.2).is_err());
        assert!(mix(&a, &b, -0.2).is_err());
        let even = mix(&a, &b, 0.5).unwrap();
        assert!(even.matrix().max_abs_diff(werner(0.5).unwrap().matrix()) <= 1e-15);
    }

    #[test]
    fn x_state_reproduces_the_noisy_family() {
        for (p, q) in [(0.8, 0.1), (0.3, 0.7), (1.0, 0.5), (0.0, 0.2)] {
            let pr = params(p, q);
            let direct = gws(pr);
            let via_x = x_state(&pr.x_state_params()).unwrap();
            assert!(
                via_x.matrix().max_abs_diff(direct.matrix()) <= 1e-15,
                "(p, q) = ({p}, {q})"
            );
        }
    }

    #[test]
    fn x_state_validation_paths() {
        let base = |e: f64, f: f64| XStateParams {
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            e: Complex::new(e, 0.0),
            f: Complex::new(f, 0.0),
        };
        assert!(x_state(&base(0.2, 0.1)).is_ok());
        assert!(matches!(
            x_state(&base(0.3, 0.0)),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(matches!(
            x_state(&base(0.0, 0.3)),
            Err(Error::NotPositiveSemidefinite { .. })
        ));

        let mut bad_trace = base(0.0, 0.0);
        bad_trace.a = 0.5;
        assert!(matches!(
            x_state(&bad_trace),
            Err(Error::TraceNotOne { .. })
        ));

        let mut negative = base(0.0, 0.0);
        negative.b = -0.1;
        negative.a = 0.6;
        assert!(matches!(
            x_state(&negative),
            Err(Error::ParamOutOfRange { name: "b", .. })
        ));
    }

    #[test]
    fn swapping_q_for_its_complement_is_a_local_flip() {
        let flip = pauli::<f64>(PauliAxis::X).kron(&pauli(PauliAxis::X));
        for (p, q) in [(0.9, 0.1), (0.5, 0.3), (0.7, 0.8)] {
            let rho = gws(params(p, q));
            let conjugated = &(&flip * rho.matrix()) * &flip;
            let swapped = gws(params(p, 1.0 - q));
            assert!(
                conjugated.max_abs_diff(swapped.matrix()) <= 1e-15,
                "(p, q) = ({p}, {q})"
            );
        }
    }

    #[test]
    fn setup_ratios_match_hand_computed_values() {
        let r = setup_ratios(&params(0.8, 0.1)).unwrap();
        assert!((r.r_ad - 0.52 / 3.08).abs() <= 1e-15);
        assert!((r.visibility - 0.48 / 0.9).abs() <= 1e-15);
        assert!((r.r_ab - 2.6).abs() <= 1e-12);
        // the symmetric point has equal outer diagonal entries
        let sym = setup_ratios(&params(0.6, 0.5)).unwrap();
        assert!((sym.r_ad - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn setup_ratios_refuse_the_noiseless_limit() {
        assert!(matches!(
            setup_ratios(&params(1.0, 0.3)),
            Err(Error::DivisionByZero("r_ab at p = 1"))
        ));
        assert!(matches!(
            setup_ratios(&params(1.0, 1.0)),
            Err(Error::DivisionByZero("r_ad at p = 1, q = 1"))
        ));
    }
}
