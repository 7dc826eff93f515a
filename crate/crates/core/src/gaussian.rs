//! Single-mode Gaussian states and their exact evolution under quadratic
//! Hamiltonians.
//!
//! Quadratures are `X = (a + a†)/√2` and `P = i(a† − a)/√2`, so `[X, P] = i`
//! and the vacuum covariance is `I/2`.

use num_complex::Complex64;

use crate::algebra::{to_quadrature_form, QuadraticOperator, QuadratureForm};
use crate::error::Result;
use crate::linalg::{self, Mat2, Mat3, OMEGA};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    /// `(⟨X⟩, ⟨P⟩)`.
    pub mu: [f64; 2],
    /// `σ_jk = ½⟨{r_j − μ_j, r_k − μ_k}⟩`.
    pub sigma: Mat2,
}

impl GaussianState {
    pub fn vacuum() -> Self {
        Self::coherent(Complex64::new(0.0, 0.0))
    }

    /// `|α⟩`: `μ = √2(Re α, Im α)`, `σ = I/2`.
    pub fn coherent(alpha: Complex64) -> Self {
        let r2 = core::f64::consts::SQRT_2;
        Self {
            mu: [r2 * alpha.re, r2 * alpha.im],
            sigma: [[0.5, 0.0], [0.0, 0.5]],
        }
    }

    /// Evolves by `exp(−iHt)`.
    pub fn evolve(&self, h: &QuadraticOperator, t: f64) -> Result<Self> {
        Ok(PhaseSpaceMap::new(h, t)?.apply(self))
    }

    /// `⟨a†a⟩ = (σ_xx + σ_pp + μ_x² + μ_p² − 1)/2`.
    pub fn mean_photon(&self) -> f64 {
        let [x, p] = self.mu;
        0.5 * (self.sigma[0][0] + self.sigma[1][1] + x * x + p * p - 1.0)
    }

    /// `⟨O⟩ = ½Tr(Gσ) + ½μᵀGμ + vᵀμ + c0`.
    pub fn expectation(&self, op: &QuadraticOperator) -> Result<f64> {
        let f = to_quadrature_form(op)?;
        Ok(self.expectation_of(&f))
    }

    fn expectation_of(&self, f: &QuadratureForm) -> f64 {
        let gm = linalg::apply2(&f.g, &self.mu);
        0.5 * linalg::trace2(&linalg::mul2(&f.g, &self.sigma))
            + 0.5 * (gm[0] * self.mu[0] + gm[1] * self.mu[1])
            + f.v[0] * self.mu[0]
            + f.v[1] * self.mu[1]
            + f.c0
    }

    /// `Var[O] = ⟨O²⟩ − ⟨O⟩²`.
    ///
    /// Writing `r = μ + δ` gives `O = ½δᵀGδ + wᵀδ + const` with `w = Gμ + v`.
    /// The cross term has an odd Weyl symbol and averages to zero. The
    /// quadratic piece follows from the Moyal product: the Weyl symbol of
    /// `A²` for `A = ½δᵀGδ` is `A_W² − det(G)/4`, and Isserlis gives the
    /// classical part, so
    ///
    /// ```text
    /// Var[O] = ½Tr(GσGσ) − ¼det G + wᵀσw
    /// ```
    pub fn variance(&self, op: &QuadraticOperator) -> Result<f64> {
        let f = to_quadrature_form(op)?;
        let gs = linalg::mul2(&f.g, &self.sigma);
        let gm = linalg::apply2(&f.g, &self.mu);
        let w = [gm[0] + f.v[0], gm[1] + f.v[1]];
        let sw = linalg::apply2(&self.sigma, &w);
        Ok(0.5 * linalg::trace2(&linalg::mul2(&gs, &gs)) - 0.25 * linalg::det2(&f.g)
            + w[0] * sw[0]
            + w[1] * sw[1])
    }

    /// `(⟨P⟩, Var[P])`.
    pub fn quadrature_stats(&self) -> (f64, f64) {
        (self.mu[1], self.sigma[1][1])
    }

    /// Smallest eigenvalue of `σ + iΩ/2`; non-negative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        // Eigenvalues of the Hermitian matrix [[a, b + i/2], [b − i/2, d]].
        let (a, b, d) = (self.sigma[0][0], self.sigma[0][1], self.sigma[1][1]);
        let mean = 0.5 * (a + d);
        let rad = libm::sqrt(0.25 * (a - d) * (a - d) + b * b + 0.25);
        mean - rad
    }

    pub fn purity_det(&self) -> f64 {
        linalg::det2(&self.sigma)
    }
}

/// The affine symplectic map `r ↦ S r + d` generated by a quadratic
/// Hamiltonian over a time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceMap {
    pub s: Mat2,
    pub d: [f64; 2],
}

impl PhaseSpaceMap {
    /// Heisenberg equations read `ṙ = Ω(G r + v)`. Both `S` and `d` come out
    /// of a single exponential of the homogeneous generator
    /// `[[ΩG, Ωv], [0, 0]]·t`, which stays valid when `G` is singular.
    pub fn new(h: &QuadraticOperator, t: f64) -> Result<Self> {
        let f = to_quadrature_form(h)?;
        let og = linalg::mul2(&OMEGA, &f.g);
        let ov = linalg::apply2(&OMEGA, &f.v);
        let gen: Mat3 = [
            [og[0][0] * t, og[0][1] * t, ov[0] * t],
            [og[1][0] * t, og[1][1] * t, ov[1] * t],
            [0.0, 0.0, 0.0],
        ];
        let e = linalg::expm3(&gen);
        Ok(Self {
            s: [[e[0][0], e[0][1]], [e[1][0], e[1][1]]],
            d: [e[0][2], e[1][2]],
        })
    }

    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        let m = linalg::apply2(&self.s, &state.mu);
        GaussianState {
            mu: [m[0] + self.d[0], m[1] + self.d[1]],
            sigma: linalg::congruence(&self.s, &state.sigma),
        }
    }

    pub fn symplectic_defect(&self) -> f64 {
        linalg::symplectic_defect(&self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coherent_moments() {
        let s = GaussianState::coherent(c(0.3, 1.0));
        assert!((s.mu[0] - 0.3 * core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((s.mu[1] - core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((s.mean_photon() - 1.09).abs() < 1e-14);
        let (m, v) = s.quadrature_stats();
        assert!((m - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(v, 0.5);
    }

    #[test]
    fn vacuum_moments() {
        let s = GaussianState::vacuum();
        assert_eq!(s.mean_photon(), 0.0);
        assert_eq!(s.quadrature_stats(), (0.0, 0.5));
        assert_eq!(s.expectation(&QuadraticOperator::number()).unwrap(), 0.0);
        assert!((s.variance(&QuadraticOperator::position()).unwrap() - 0.5).abs() < 1e-15);
        assert!(s.variance(&QuadraticOperator::number()).unwrap().abs() < 1e-15);
        assert!(s.uncertainty_margin().abs() < 1e-15);
        assert!((s.purity_det() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn coherent_number_statistics_are_poissonian() {
        let alpha = c(0.3, 1.0);
        let s = GaussianState::coherent(alpha);
        let v = s.variance(&QuadraticOperator::number()).unwrap();
        assert!((v - alpha.norm_sqr()).abs() < 1e-14);
        let x = s.expectation(&QuadraticOperator::position()).unwrap();
        assert!((x - core::f64::consts::SQRT_2 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn free_rotation_of_coherent_state() {
        let alpha = c(0.3, 1.0);
        let t = 2.1;
        let out = GaussianState::coherent(alpha)
            .evolve(&QuadraticOperator::number(), t)
            .unwrap();
        let want = GaussianState::coherent(alpha * Complex64::from_polar(1.0, -t));
        for i in 0..2 {
            assert!((out.mu[i] - want.mu[i]).abs() < 1e-13);
            for j in 0..2 {
                assert!((out.sigma[i][j] - want.sigma[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let s = GaussianState::coherent(c(-0.7, 0.2));
        let h = QuadraticOperator::number() + QuadraticOperator::position();
        assert_eq!(s.evolve(&h, 0.0).unwrap(), s);
    }

    #[test]
    fn displacement_generator_shifts_momentum() {
        // exp(−i p X) shifts P by −p.
        let s = GaussianState::vacuum()
            .evolve(&QuadraticOperator::position(), 0.8)
            .unwrap();
        assert!(s.mu[0].abs() < 1e-15);
        assert!((s.mu[1] + 0.8).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let s = GaussianState::vacuum();
        assert!(s.evolve(&QuadraticOperator::annihilation(), 1.0).is_err());
        assert!(s.variance(&QuadraticOperator::creation()).is_err());
    }
}
