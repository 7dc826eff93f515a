//! Brute-force truncated Fock-space simulator.
//!
//! Independent of the phase-space machinery in `canp-core`: operators are
//! built as dense matrices from ladder-operator matrix elements and evolved
//! through a Hermitian eigendecomposition.

use canp_core::{Complex64, ProtocolSpec, QuadraticOperator};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Starting truncation for `|α| ≤ 1.5` probes.
pub const DEFAULT_DIM: usize = 60;
/// Escalation stops here.
pub const MAX_DIM: usize = 480;
/// Mass allowed in the top five number states.
pub const TAIL_TOL: f64 = 1e-10;
const TAIL_WIDTH: usize = 5;
/// Intermediate times at which an evolution is also checked; a state can
/// touch the cutoff mid-evolution and come back looking converged.
const CHECKPOINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("truncation not converged at dim {dim} (tail mass {tail:e})")]
    TruncationNotConverged { dim: usize, tail: f64 },

    #[error("matrix is not a density operator: {0}")]
    NotPositive(String),

    #[error(transparent)]
    Core(#[from] canp_core::Error),
}

pub type Result<T> = std::result::Result<T, FockError>;

/// Matrix of `O` in the number basis `|0⟩ … |dim−1⟩`.
pub fn build_matrix(op: &QuadraticOperator, dim: usize) -> DMatrix<Complex64> {
    assert!(dim >= 2, "truncation must keep at least two levels");
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let n = k as f64;
        m[(k, k)] += op.n * n + op.one;
        if k >= 1 {
            m[(k - 1, k)] += op.a * n.sqrt();
            m[(k, k - 1)] += op.ad * n.sqrt();
        }
        if k >= 2 {
            m[(k - 2, k)] += op.aa * (n * (n - 1.0)).sqrt();
            m[(k, k - 2)] += op.adad * (n * (n - 1.0)).sqrt();
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub amps: DVector<Complex64>,
}

impl FockState {
    /// `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, truncated (not renormalized).
    pub fn coherent(alpha: Complex64, dim: usize) -> Self {
        let mut amps = DVector::zeros(dim);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            amps[n] = c;
            c = c * alpha / ((n + 1) as f64).sqrt();
        }
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `Σ_{n ≥ dim−5} |ψ_n|²`.
    pub fn tail_mass(&self) -> f64 {
        let start = self.dim().saturating_sub(TAIL_WIDTH);
        self.amps.rows(start, self.dim() - start).norm_squared()
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail < TAIL_TOL {
            Ok(())
        } else {
            Err(FockError::TruncationNotConverged {
                dim: self.dim(),
                tail,
            })
        }
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn expectation(&self, m: &DMatrix<Complex64>) -> f64 {
        self.amps.dotc(&(m * &self.amps)).re
    }

    /// `‖Mψ‖² − ⟨M⟩²` for Hermitian `M`.
    pub fn variance(&self, m: &DMatrix<Complex64>) -> f64 {
        let v = m * &self.amps;
        let mean = self.amps.dotc(&v).re;
        v.norm_squared() - mean * mean
    }

    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        &self.amps * self.amps.adjoint()
    }

    /// Quadrature means, symmetrized covariance and photon number.
    pub fn moments(&self) -> FockMoments {
        let dim = self.dim();
        let x = build_matrix(&QuadraticOperator::position(), dim);
        let p = build_matrix(&QuadraticOperator::momentum(), dim);
        let (xv, pv) = (&x * &self.amps, &p * &self.amps);
        let mu = [self.amps.dotc(&xv).re, self.amps.dotc(&pv).re];
        let xp = xv.dotc(&pv).re;
        FockMoments {
            mu,
            sigma: [
                [xv.norm_squared() - mu[0] * mu[0], xp - mu[0] * mu[1]],
                [xp - mu[0] * mu[1], pv.norm_squared() - mu[1] * mu[1]],
            ],
            mean_photon: self.expectation(&build_matrix(&QuadraticOperator::number(), dim)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mu: [f64; 2],
    pub sigma: [[f64; 2]; 2],
    pub mean_photon: f64,
}

/// `exp(−iHt)` for all `t` from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<Complex64>) -> Self {
        let n = h.nrows();
        let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || h[(i, j)] == Complex64::new(0.0, 0.0)));
        if diagonal {
            Self {
                energies: h.diagonal().map(|z| z.re),
                vectors: DMatrix::identity(n, n),
            }
        } else if h.iter().all(|z| z.im == 0.0) {
            let eig = h.map(|z| z.re).symmetric_eigen();
            Self {
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
            }
        } else {
            let eig = h.clone().symmetric_eigen();
            Self {
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        }
    }

    pub fn for_operator(op: &QuadraticOperator, dim: usize) -> Result<Self> {
        if !op.is_hermitian() {
            return Err(canp_core::Error::NotHermitian.into());
        }
        Ok(Self::new(&build_matrix(op, dim)))
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.energies
    }

    fn apply_unchecked(&self, coeffs: &DVector<Complex64>, t: f64) -> FockState {
        let mut c = coeffs.clone();
        for (ck, e) in c.iter_mut().zip(self.energies.iter()) {
            *ck *= Complex64::from_polar(1.0, -e * t);
        }
        FockState {
            amps: &self.vectors * c,
        }
    }

    /// Applies `exp(−iHt)`, checking the tail-mass invariant at the end and
    /// at evenly spaced intermediate times.
    pub fn apply(&self, state: &FockState, t: f64) -> Result<FockState> {
        let coeffs = self.vectors.ad_mul(&state.amps);
        for k in 1..CHECKPOINTS {
            self.apply_unchecked(&coeffs, t * k as f64 / CHECKPOINTS as f64)
                .check_tail()?;
        }
        let out = self.apply_unchecked(&coeffs, t);
        out.check_tail()?;
        Ok(out)
    }
}

pub fn evolve_fock(state: &FockState, h: &QuadraticOperator, t: f64) -> Result<FockState> {
    Propagator::for_operator(h, state.dim())?.apply(state, t)
}

/// A protocol instance resolved in a fixed truncation.
pub struct FockProtocol {
    spec: ProtocolSpec,
    preparation: Propagator,
    encoding: Propagator,
    prepared: FockState,
}

impl FockProtocol {
    pub fn new(spec: &ProtocolSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        let probe = FockState::coherent(spec.alpha, dim);
        probe.check_tail()?;
        let preparation = Propagator::for_operator(&spec.hc, dim)?;
        let encoding = Propagator::for_operator(&spec.htheta, dim)?;
        let prepared = preparation.apply(&probe, spec.t_c)?;
        Ok(Self {
            spec: *spec,
            preparation,
            encoding,
            prepared,
        })
    }

    /// Doubles the truncation from [`DEFAULT_DIM`] up to [`MAX_DIM`] until
    /// every evolution keeps its tail below [`TAIL_TOL`], probing the
    /// encoding at `θ0 ± span`.
    pub fn converged(spec: &ProtocolSpec, span: f64) -> Result<Self> {
        Self::converged_up_to(spec, span, MAX_DIM)
    }

    pub fn converged_up_to(spec: &ProtocolSpec, span: f64, max_dim: usize) -> Result<Self> {
        let mut dim = DEFAULT_DIM;
        loop {
            let attempt = Self::new(spec, dim).and_then(|p| {
                p.state(spec.theta0 - span)?;
                p.state(spec.theta0 + span)?;
                Ok(p)
            });
            match attempt {
                Err(FockError::TruncationNotConverged { .. }) if dim < max_dim => dim *= 2,
                other => return other,
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.prepared.dim()
    }

    pub fn preparation(&self) -> &Propagator {
        &self.preparation
    }

    pub fn prepared_state(&self) -> &FockState {
        &self.prepared
    }

    /// `exp(−iθ t_θ Hθ) exp(−i t_c Hc)|α⟩`.
    pub fn state(&self, theta: f64) -> Result<FockState> {
        self.encoding
            .apply(&self.prepared, theta * self.spec.t_theta)
    }

    /// [`qfi_numeric`] in this truncation.
    pub fn qfi(&self, dtheta: f64) -> Result<f64> {
        let (f1, f2) = (self.fidelity_qfi(dtheta)?, self.fidelity_qfi(2.0 * dtheta)?);
        Ok((4.0 * f1 - f2) / 3.0)
    }

    fn fidelity_qfi(&self, step: f64) -> Result<f64> {
        let minus = self.state(self.spec.theta0 - step)?;
        let plus = self.state(self.spec.theta0 + step)?;
        let overlap = minus.overlap(&plus).norm();
        Ok(8.0 * (1.0 - overlap) / (4.0 * step * step))
    }
}

/// Numeric QFI `8(1 − |⟨ψ(θ−δ)|ψ(θ+δ)⟩|)/(2δ)²` refined by one Richardson
/// step, `(4F(δ) − F(2δ))/3`.
pub fn qfi_numeric(spec: &ProtocolSpec, dtheta: f64) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&dtheta) {
        return Err(canp_core::Error::InvalidStep(dtheta).into());
    }
    FockProtocol::converged(spec, 2.0 * dtheta)?.qfi(dtheta)
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Wigner-Yanase skew information `−½ Tr([√B, K]²) = Tr(BK²) − Tr(√B K √B K)`.
pub fn skew_information_general(b: &DMatrix<Complex64>, k: &DMatrix<Complex64>) -> Result<f64> {
    if !b.is_square() || b.shape() != k.shape() {
        return Err(FockError::NotPositive("shape mismatch".into()));
    }
    if hermitian_defect(b) > 1e-10 {
        return Err(FockError::NotPositive("not Hermitian".into()));
    }
    let trace = b.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(FockError::NotPositive(format!("trace {trace}")));
    }
    let eig = b.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -1e-10 {
        return Err(FockError::NotPositive(format!("eigenvalue {min:e}")));
    }
    // Roundoff-level eigenvalues would contribute O(√ε) through the square
    // root, so they are dropped.
    let floor = 1e-12 * eig.eigenvalues.max().max(0.0);
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0));
    let sqrt_b = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint();
    let sk = &sqrt_b * k;
    let s = (b * k * k).trace().re - (&sk * &sk).trace().re;
    Ok(s)
}
