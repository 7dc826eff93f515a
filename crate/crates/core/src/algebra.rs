//! Quadratic single-mode bosonic operators.
//!
//! Every operator handled by this crate lives in the six-dimensional Lie
//! algebra spanned by `{a†a, a², a†², a, a†, 1}`. Commutators are computed
//! exactly from `[a, a†] = 1`, so the algebra is closed by construction.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for Hermiticity and coefficient comparisons.
pub const COEFF_TOL: f64 = 1e-12;

/// Largest relative residual of `ad³(Hθ) = Δ·ad(Hθ)` accepted as satisfying
/// the criterion.
pub const CONDITION_TOL: f64 = 1e-8;

/// Below this value of `Δ·t_c²` the preparation coefficients are evaluated
/// from their Taylor series.
pub const SERIES_SWITCH: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `n·a†a + aa·a² + adad·(a†)² + a·a + ad·a† + one·1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadraticOperator {
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub n: Complex64,
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub aa: Complex64,
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub adad: Complex64,
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub a: Complex64,
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub ad: Complex64,
    #[cfg_attr(feature = "serde", serde(with = "pair"))]
    pub one: Complex64,
}

impl QuadraticOperator {
    pub const ZERO: Self = Self::from_coefficients([ZERO; 6]);

    /// Coefficients in the order `[n, aa, adad, a, ad, one]`.
    pub const fn from_coefficients(c: [Complex64; 6]) -> Self {
        Self {
            n: c[0],
            aa: c[1],
            adad: c[2],
            a: c[3],
            ad: c[4],
            one: c[5],
        }
    }

    pub const fn coefficients(&self) -> [Complex64; 6] {
        [self.n, self.aa, self.adad, self.a, self.ad, self.one]
    }

    /// The number operator `a†a`.
    pub const fn number() -> Self {
        let mut c = [ZERO; 6];
        c[0] = Complex64::new(1.0, 0.0);
        Self::from_coefficients(c)
    }

    pub const fn identity() -> Self {
        let mut c = [ZERO; 6];
        c[5] = Complex64::new(1.0, 0.0);
        Self::from_coefficients(c)
    }

    pub const fn annihilation() -> Self {
        let mut c = [ZERO; 6];
        c[3] = Complex64::new(1.0, 0.0);
        Self::from_coefficients(c)
    }

    pub const fn creation() -> Self {
        let mut c = [ZERO; 6];
        c[4] = Complex64::new(1.0, 0.0);
        Self::from_coefficients(c)
    }

    /// `X = (a + a†)/√2`.
    pub fn position() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: Complex64::new(s, 0.0),
            ad: Complex64::new(s, 0.0),
            ..Self::ZERO
        }
    }

    /// `P = i(a† − a)/√2`.
    pub fn momentum() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: Complex64::new(0.0, -s),
            ad: Complex64::new(0.0, s),
            ..Self::ZERO
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n.conj(),
            aa: self.adad.conj(),
            adad: self.aa.conj(),
            a: self.ad.conj(),
            ad: self.a.conj(),
            one: self.one.conj(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.n.im.abs() <= COEFF_TOL
            && self.one.im.abs() <= COEFF_TOL
            && (self.adad - self.aa.conj()).norm() <= COEFF_TOL
            && (self.ad - self.a.conj()).norm() <= COEFF_TOL
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coefficients()
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::from_coefficients(self.coefficients().map(|z| z * k))
    }
}

impl Add for QuadraticOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (l, r) = (self.coefficients(), rhs.coefficients());
        Self::from_coefficients(core::array::from_fn(|i| l[i] + r[i]))
    }
}

impl Sub for QuadraticOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (l, r) = (self.coefficients(), rhs.coefficients());
        Self::from_coefficients(core::array::from_fn(|i| l[i] - r[i]))
    }
}

impl Neg for QuadraticOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_coefficients(self.coefficients().map(|z| -z))
    }
}

impl Mul<f64> for QuadraticOperator {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::from_coefficients(self.coefficients().map(|z| z * k))
    }
}

impl Mul<Complex64> for QuadraticOperator {
    type Output = Self;
    fn mul(self, k: Complex64) -> Self {
        self.scale(k)
    }
}

/// `[A, B]` from the basis relations
///
/// ```text
/// [a†a, a²] = −2a²   [a†a, a†²] = 2a†²   [a†a, a] = −a   [a†a, a†] = a†
/// [a², a†²] = 4a†a + 2   [a², a†] = 2a   [a†², a] = −2a†   [a, a†] = 1
/// ```
pub fn commutator(x: &QuadraticOperator, y: &QuadraticOperator) -> QuadraticOperator {
    let wedge = |p: Complex64, q: Complex64, r: Complex64, s: Complex64| p * s - q * r;
    QuadraticOperator {
        n: wedge(x.aa, x.adad, y.aa, y.adad) * 4.0,
        aa: wedge(x.n, x.aa, y.n, y.aa) * -2.0,
        adad: wedge(x.n, x.adad, y.n, y.adad) * 2.0,
        a: -wedge(x.n, x.a, y.n, y.a) + wedge(x.aa, x.ad, y.aa, y.ad) * 2.0,
        ad: wedge(x.n, x.ad, y.n, y.ad) - wedge(x.adad, x.a, y.adad, y.a) * 2.0,
        one: wedge(x.aa, x.adad, y.aa, y.adad) * 2.0 + wedge(x.a, x.ad, y.a, y.ad),
    }
}

/// `Ĉ`, `D̂` and `Δ` derived from a preparation/encoding Hamiltonian pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalStructure {
    /// `i[Hc, Hθ]`.
    pub c: QuadraticOperator,
    /// `[Hc, [Hc, Hθ]]`.
    pub d: QuadraticOperator,
    pub delta: f64,
    /// Relative residual of `ad³(Hθ) − Δ·ad(Hθ)`.
    pub residual: f64,
}

impl CriticalStructure {
    /// `Γ = −i√Δ·Ĉ + D̂`.
    pub fn gamma(&self) -> QuadraticOperator {
        self.c * Complex64::new(0.0, -libm::sqrt(self.delta)) + self.d
    }
}

/// Checks `[Hc, Γ] = √Δ·Γ` and extracts `Δ`.
///
/// Substituting `Γ = −i√Δ Ĉ + D̂` turns the relation into
/// `ad³_Hc(Hθ) = Δ·ad_Hc(Hθ)`, so `Δ` is the real least-squares ratio of
/// the two coefficient vectors. The residual is
/// `max|ad³ − Δ·ad| / max|ad³|`, zero when `ad³` vanishes.
pub fn derive_critical_structure(
    hc: &QuadraticOperator,
    htheta: &QuadraticOperator,
) -> Result<CriticalStructure> {
    if !hc.is_hermitian() || !htheta.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let k1 = commutator(hc, htheta);
    let scale = hc.max_abs().max(1.0) * htheta.max_abs().max(1.0);
    if k1.max_abs() <= COEFF_TOL * scale {
        return Err(Error::CommutingPair);
    }
    let d = commutator(hc, &k1);
    let k3 = commutator(hc, &d);

    let (v1, v3) = (k1.coefficients(), k3.coefficients());
    let num: f64 = v1.iter().zip(&v3).map(|(p, q)| (p.conj() * q).re).sum();
    let den: f64 = v1.iter().map(|p| p.norm_sqr()).sum();
    let mut delta = num / den;

    let k3_max = k3.max_abs();
    let residual = if k3_max == 0.0 {
        0.0
    } else {
        (k3 - k1 * delta).max_abs() / k3_max
    };
    if residual > CONDITION_TOL {
        return Err(Error::ConditionViolated { residual });
    }
    if delta < 0.0 {
        if delta < -COEFF_TOL * scale * scale {
            return Err(Error::NegativeDelta { delta });
        }
        delta = 0.0;
    }

    Ok(CriticalStructure {
        c: k1 * Complex64::new(0.0, 1.0),
        d,
        delta,
        residual,
    })
}

/// Scalar weights of `Ĉ` and `D̂` in the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationCoefficients {
    /// `sin(√Δ t_c)/√Δ`.
    pub sin_term: f64,
    /// `(cos(√Δ t_c) − 1)/Δ`.
    pub cos_term: f64,
}

pub fn preparation_coefficients(delta: f64, t_c: f64) -> PreparationCoefficients {
    let x = delta * t_c * t_c;
    if x < SERIES_SWITCH {
        let sin_term = t_c * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)));
        let cos_term = -0.5 * t_c * t_c * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (1.0 - x / 56.0)));
        PreparationCoefficients { sin_term, cos_term }
    } else {
        let root = libm::sqrt(delta);
        let half = libm::sin(0.5 * root * t_c);
        // cos y − 1 = −2 sin²(y/2) avoids the cancellation near y = 0.
        PreparationCoefficients {
            sin_term: libm::sin(root * t_c) / root,
            cos_term: -2.0 * half * half / delta,
        }
    }
}

/// `ĥ = t_θ (Hθ + sin(√Δt_c)/√Δ · Ĉ + (cos(√Δt_c) − 1)/Δ · D̂)`, i.e.
/// `t_θ·U_c† Hθ U_c` with `U_c = exp(−i t_c Hc)`.
pub fn generator(
    htheta: &QuadraticOperator,
    cs: &CriticalStructure,
    t_c: f64,
    t_theta: f64,
) -> Result<QuadraticOperator> {
    if !(cs.residual <= CONDITION_TOL) {
        return Err(Error::ConditionViolated {
            residual: cs.residual,
        });
    }
    let k = preparation_coefficients(cs.delta, t_c);
    Ok((*htheta + cs.c * k.sin_term + cs.d * k.cos_term) * t_theta)
}

/// `O = ½ rᵀ G r + vᵀ r + c0` with `r = (X, P)` and symmetric ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureForm {
    pub g: [[f64; 2]; 2],
    pub v: [f64; 2],
    pub c0: f64,
}

impl QuadratureForm {
    /// Inverse of [`to_quadrature_form`].
    pub fn to_operator(&self) -> QuadraticOperator {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let n = 0.5 * (self.g[0][0] + self.g[1][1]);
        let aa = Complex64::new(0.25 * (self.g[0][0] - self.g[1][1]), -0.5 * self.g[0][1]);
        let a = Complex64::new(self.v[0] * s, -self.v[1] * s);
        QuadraticOperator {
            n: Complex64::new(n, 0.0),
            aa,
            adad: aa.conj(),
            a,
            ad: a.conj(),
            one: Complex64::new(self.c0 + 0.5 * n, 0.0),
        }
    }
}

/// Rewrites a Hermitian operator in quadrature variables.
///
/// With `a = (X + iP)/√2`: `a†a = (X² + P² − 1)/2`,
/// `a² = (X² − P² + i{X,P})/2`, and the linear part maps to
/// `√2 Re(c_a)·X − √2 Im(c_a)·P`.
pub fn to_quadrature_form(op: &QuadraticOperator) -> Result<QuadratureForm> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = op.n.re;
    let aa = op.aa;
    let r2 = core::f64::consts::SQRT_2;
    Ok(QuadratureForm {
        g: [
            [n + 2.0 * aa.re, -2.0 * aa.im],
            [-2.0 * aa.im, n - 2.0 * aa.re],
        ],
        v: [r2 * op.a.re, -r2 * op.a.im],
        c0: op.one.re - 0.5 * n,
    })
}

#[cfg(feature = "serde")]
mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Pair {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Pair { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Pair::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qrm(g: f64) -> QuadraticOperator {
        QuadraticOperator {
            n: c(1.0 - 0.5 * g * g, 0.0),
            aa: c(-0.25 * g * g, 0.0),
            adad: c(-0.25 * g * g, 0.0),
            one: c(-0.25 * g * g, 0.0),
            ..QuadraticOperator::ZERO
        }
    }

    #[test]
    fn number_lowers_annihilator() {
        let r = commutator(&QuadraticOperator::number(), &QuadraticOperator::annihilation());
        assert_eq!(r, -QuadraticOperator::annihilation());
    }

    #[test]
    fn canonical_commutator() {
        let r = commutator(&QuadraticOperator::annihilation(), &QuadraticOperator::creation());
        assert_eq!(r, QuadraticOperator::identity());
        let xp = commutator(&QuadraticOperator::position(), &QuadraticOperator::momentum());
        assert!(xp.distance(&QuadraticOperator::identity().scale(c(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn self_commutator_vanishes() {
        let h = qrm(0.7);
        assert_eq!(commutator(&h, &h), QuadraticOperator::ZERO);
    }

    #[test]
    fn qrm_c_operator() {
        let r = commutator(&qrm(0.9), &QuadraticOperator::number()).scale(c(0.0, 1.0));
        assert!((r.adad - c(0.0, 0.405)).norm() < 1e-15);
        assert!((r.aa - c(0.0, -0.405)).norm() < 1e-15);
        assert!(r.n.norm() + r.a.norm() + r.ad.norm() + r.one.norm() < 1e-15);
    }

    #[test]
    fn hermiticity_flag() {
        assert!(qrm(0.5).is_hermitian());
        assert!(QuadraticOperator::momentum().is_hermitian());
        assert!(!QuadraticOperator::annihilation().is_hermitian());
        let skew = commutator(&qrm(0.5), &QuadraticOperator::position());
        assert!(!skew.is_hermitian());
        assert!(skew.scale(c(0.0, 1.0)).is_hermitian());
    }

    #[test]
    fn commuting_pair_is_rejected() {
        let n = QuadraticOperator::number();
        assert_eq!(derive_critical_structure(&n, &n), Err(Error::CommutingPair));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let r = derive_critical_structure(&QuadraticOperator::annihilation(), &QuadraticOperator::number());
        assert_eq!(r, Err(Error::NotHermitian));
    }

    #[test]
    fn negative_delta_for_inverted_oscillator() {
        // H = (X² − P²)/2 = (a² + a†²)/2 generates hyperbolic motion.
        let h = QuadraticOperator {
            aa: c(0.5, 0.0),
            adad: c(0.5, 0.0),
            ..QuadraticOperator::ZERO
        };
        match derive_critical_structure(&h, &QuadraticOperator::number()) {
            Err(Error::NegativeDelta { delta }) => assert!((delta + 4.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn violated_condition_is_reported() {
        // Hc = a†a + X: ad³ mixes the quadratic and linear sectors with
        // different frequencies.
        let hc = QuadraticOperator::number() + qrm(0.8) + QuadraticOperator::position();
        let ht = QuadraticOperator::number() + QuadraticOperator::position();
        assert!(matches!(
            derive_critical_structure(&hc, &ht),
            Err(Error::ConditionViolated { .. })
        ));
    }

    #[test]
    fn critical_point_gives_zero_delta() {
        let cs = derive_critical_structure(&qrm(1.0), &QuadraticOperator::number()).unwrap();
        assert_eq!(cs.delta, 0.0);
        let h = generator(&QuadraticOperator::number(), &cs, 2.0, 1.0).unwrap();
        let expect = QuadraticOperator::number() + cs.c * 2.0 + cs.d * -2.0;
        assert!(h.distance(&expect) < 1e-14);
    }

    #[test]
    fn series_branch_limits() {
        let k = preparation_coefficients(0.0, 1.7);
        assert_eq!(k.sin_term, 1.7);
        assert_eq!(k.cos_term, -0.5 * 1.7 * 1.7);
    }

    #[test]
    fn series_switch_is_continuous() {
        for &t_c in &[0.1, 1.0, 3.0, 10.0] {
            let delta = SERIES_SWITCH / (t_c * t_c);
            let lo = preparation_coefficients(delta * (1.0 - 1e-9), t_c);
            let hi = preparation_coefficients(delta * (1.0 + 1e-9), t_c);
            assert!((lo.sin_term - hi.sin_term).abs() < 1e-10);
            assert!((lo.cos_term - hi.cos_term).abs() < 1e-10);
        }
    }

    #[test]
    fn generator_rejects_bad_structure() {
        let mut cs = derive_critical_structure(&qrm(0.5), &QuadraticOperator::number()).unwrap();
        cs.residual = 1e-3;
        assert!(generator(&QuadraticOperator::number(), &cs, 1.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_forms() {
        let f = to_quadrature_form(&QuadraticOperator::number()).unwrap();
        assert_eq!(f.g, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(f.v, [0.0, 0.0]);
        assert_eq!(f.c0, -0.5);

        let f = to_quadrature_form(&QuadraticOperator::position()).unwrap();
        assert_eq!(f.g, [[0.0; 2]; 2]);
        assert!((f.v[0] - 1.0).abs() < 1e-15 && f.v[1] == 0.0);
        assert_eq!(f.c0, 0.0);

        let f = to_quadrature_form(&QuadraticOperator::momentum()).unwrap();
        assert!(f.v[0].abs() < 1e-15 && (f.v[1] - 1.0).abs() < 1e-15);

        let g = 0.9;
        let f = to_quadrature_form(&qrm(g)).unwrap();
        assert!((f.g[0][0] - (1.0 - g * g)).abs() < 1e-15);
        assert!((f.g[1][1] - 1.0).abs() < 1e-15);
        assert_eq!(f.g[0][1], 0.0);
        assert_eq!(f.v, [0.0, 0.0]);

        assert_eq!(
            to_quadrature_form(&QuadraticOperator::annihilation()),
            Err(Error::NotHermitian)
        );
    }
}
