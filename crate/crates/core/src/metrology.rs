//! Estimation-theoretic figures of merit for a prepare-then-encode protocol
//! `U = exp(−iθ t_θ Hθ) exp(−i t_c Hc)` acting on a coherent probe.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{
    derive_critical_structure, generator, preparation_coefficients, CriticalStructure,
    QuadraticOperator,
};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::presets::ModelParams;

/// Default step for θ-derivatives.
pub const DEFAULT_DTHETA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    pub hc: QuadraticOperator,
    pub htheta: QuadraticOperator,
    pub t_c: f64,
    pub t_theta: f64,
    pub alpha: Complex64,
    /// Working point.
    pub theta0: f64,
    /// Mode frequency. Cancels from the energy constraint; enters the
    /// displacement-encoding asymptotics.
    pub omega: f64,
}

impl ProtocolSpec {
    pub fn new(
        hc: QuadraticOperator,
        htheta: QuadraticOperator,
        t_c: f64,
        t_theta: f64,
        alpha: Complex64,
    ) -> Self {
        Self {
            hc,
            htheta,
            t_c,
            t_theta,
            alpha,
            theta0: 0.0,
            omega: 1.0,
        }
    }

    pub fn from_model(
        model: &ModelParams,
        t_c: f64,
        t_theta: f64,
        alpha: Complex64,
    ) -> Result<Self> {
        let mut spec = Self::new(model.preparation()?, model.encoding(), t_c, t_theta, alpha);
        spec.omega = model.omega;
        Ok(spec)
    }

    /// Preparation time pinned to half a critical period, `τ = π/√Δ`.
    pub fn at_half_period(model: &ModelParams, t_theta: f64, alpha: Complex64) -> Result<Self> {
        let mut spec = Self::from_model(model, 0.0, t_theta, alpha)?;
        let cs = derive_critical_structure(&spec.hc, &spec.htheta)?;
        if cs.delta <= 0.0 {
            return Err(Error::OutOfPhase);
        }
        spec.t_c = PI / libm::sqrt(cs.delta);
        Ok(spec)
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn total_time(&self) -> f64 {
        self.t_c + self.t_theta
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.t_c, self.t_theta, self.theta0, self.omega, self.alpha.re, self.alpha.im]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidProtocol("non-finite field"));
        }
        if self.t_c < 0.0 || self.t_theta < 0.0 {
            return Err(Error::InvalidProtocol("negative duration"));
        }
        if !(self.total_time() > 0.0) {
            return Err(Error::InvalidProtocol("total time must be positive"));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidProtocol("mode frequency must be positive"));
        }
        if !self.hc.is_hermitian() || !self.htheta.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(())
    }

    /// `None` when the Hamiltonians commute; the preparation then drops out
    /// of the generator entirely.
    pub fn structure(&self) -> Result<Option<CriticalStructure>> {
        match derive_critical_structure(&self.hc, &self.htheta) {
            Ok(cs) => Ok(Some(cs)),
            Err(Error::CommutingPair) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// `ĥ = t_θ U_c† Hθ U_c`.
    pub fn generator(&self) -> Result<QuadraticOperator> {
        match self.structure()? {
            Some(cs) => generator(&self.htheta, &cs, self.t_c, self.t_theta),
            None => Ok(self.htheta * self.t_theta),
        }
    }

    pub fn probe(&self) -> GaussianState {
        GaussianState::coherent(self.alpha)
    }

    /// `ρ_c = U_c ρ U_c†`.
    pub fn prepared_state(&self) -> Result<GaussianState> {
        self.probe().evolve(&self.hc, self.t_c)
    }

    /// State after the full protocol at parameter value `theta`.
    pub fn final_state(&self, theta: f64) -> Result<GaussianState> {
        self.prepared_state()?
            .evolve(&self.htheta, theta * self.t_theta)
    }
}

/// Pure-state QFI `4 Var[ĥ]_ρ` on the initial probe.
pub fn qfi_exact(spec: &ProtocolSpec) -> Result<f64> {
    spec.validate()?;
    let h = spec.generator()?;
    Ok(4.0 * spec.probe().variance(&h)?)
}

/// `4 t_θ² [(cos √Δt_c − 1)/Δ]² Var[D̂]_ρ`, keeping only the `D̂` term.
pub fn qfi_asymptotic(spec: &ProtocolSpec) -> Result<f64> {
    spec.validate()?;
    let Some(cs) = spec.structure()? else {
        return Ok(0.0);
    };
    let k = preparation_coefficients(cs.delta, spec.t_c);
    let var_d = spec.probe().variance(&cs.d)?;
    Ok(4.0 * spec.t_theta * spec.t_theta * k.cos_term * k.cos_term * var_d)
}

/// Mean photon number after the full protocol at the working point.
pub fn final_mean_photon(spec: &ProtocolSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.final_state(spec.theta0)?.mean_photon())
}

/// Direct-encoding QFI `4T² Var[Hθ]` on an energy-matched coherent probe
/// `|α₀|² = ⟨a†a⟩_final`.
///
/// The probe phase is taken real. For `a†a` and `X` encodings the variance
/// is phase independent (`|α₀|²` and `½` respectively).
pub fn direct_baseline(spec: &ProtocolSpec) -> Result<f64> {
    let n0 = final_mean_photon(spec)?.max(0.0);
    let probe = GaussianState::coherent(Complex64::new(libm::sqrt(n0), 0.0));
    let total = spec.total_time();
    Ok(4.0 * total * total * probe.variance(&spec.htheta)?)
}

/// `R = F / F₀` at equal energy and total time.
pub fn enhancement_ratio(spec: &ProtocolSpec) -> Result<f64> {
    if spec.alpha.norm() < 1e-12 {
        return Err(Error::VacuumProbe);
    }
    Ok(qfi_exact(spec)? / direct_baseline(spec)?)
}

/// Wigner-Yanase skew information of `Hθ` in the prepared pure state,
/// `Var[Hθ]_{ρ_c}`.
pub fn skew_information(spec: &ProtocolSpec) -> Result<f64> {
    spec.validate()?;
    spec.prepared_state()?.variance(&spec.htheta)
}

fn check_step(dtheta: f64) -> Result<()> {
    if (1e-6..=1e-2).contains(&dtheta) {
        Ok(())
    } else {
        Err(Error::InvalidStep(dtheta))
    }
}

/// Central difference with one Richardson step,
/// `(4 D(h) − D(2h)) / 3`.
pub(crate) fn richardson<F>(f: F, x: f64, h: f64) -> Result<[f64; 2]>
where
    F: Fn(f64) -> Result<[f64; 2]>,
{
    let central = |step: f64| -> Result<[f64; 2]> {
        let (p, m) = (f(x + step)?, f(x - step)?);
        Ok([(p[0] - m[0]) / (2.0 * step), (p[1] - m[1]) / (2.0 * step)])
    };
    let (d1, d2) = (central(h)?, central(2.0 * h)?);
    Ok([(4.0 * d1[0] - d2[0]) / 3.0, (4.0 * d1[1] - d2[1]) / 3.0])
}

/// Classical Fisher information of homodyne detection of `P` on the final
/// Gaussian state,
/// `(∂θ⟨P⟩)² / Var P + ½ (∂θ Var P)² / (Var P)²`.
pub fn cfi_homodyne(spec: &ProtocolSpec, dtheta: f64) -> Result<f64> {
    spec.validate()?;
    check_step(dtheta)?;
    let prepared = spec.prepared_state()?;
    let stats = |theta: f64| -> Result<[f64; 2]> {
        let (m, v) = prepared
            .evolve(&spec.htheta, theta * spec.t_theta)?
            .quadrature_stats();
        Ok([m, v])
    };
    let [dm, dv] = richardson(stats, spec.theta0, dtheta)?;
    let [_, var] = stats(spec.theta0)?;
    Ok(dm * dm / var + 0.5 * dv * dv / (var * var))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementQfi {
    /// `4 t_p² ω² sin²(√Δ_p t_c)/Δ_p · Var[P]_ρ`.
    pub asymptotic: f64,
    /// `4 Var[ĥ]_ρ` through the generic generator.
    pub exact: f64,
}

/// QFI for a displacement encoding `Hp = (a† + a)/√2`.
pub fn qfi_displacement(spec: &ProtocolSpec) -> Result<DisplacementQfi> {
    spec.validate()?;
    let h = spec.htheta;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let quad = h.n.norm() + h.aa.norm() + h.adad.norm() + h.one.norm();
    let is_x = quad <= 1e-12
        && (h.a - Complex64::new(s, 0.0)).norm() <= 1e-12
        && (h.ad - Complex64::new(s, 0.0)).norm() <= 1e-12;
    if !is_x {
        return Err(Error::InvalidProtocol("encoding is not (a + a†)/√2"));
    }
    let exact = qfi_exact(spec)?;
    let delta = spec.structure()?.map_or(0.0, |cs| cs.delta);
    let k = preparation_coefficients(delta, spec.t_c);
    let (_, var_p) = spec.probe().quadrature_stats();
    let tw = spec.t_theta * spec.omega;
    Ok(DisplacementQfi {
        asymptotic: 4.0 * tw * tw * k.sin_term * k.sin_term * var_p,
        exact,
    })
}

/// Root of `R(τ) = 1` in the control parameter of `family` (`g` or `λ`),
/// with `t_c = τ = π/√Δ` at each trial value. Bisection to `1e-10`.
pub fn find_threshold(
    family: &ModelParams,
    t_theta: f64,
    alpha: Complex64,
    bracket: (f64, f64),
) -> Result<f64> {
    let excess = |x: f64| -> Result<f64> {
        let spec = ProtocolSpec::at_half_period(&family.with_control(x), t_theta, alpha)?;
        Ok(enhancement_ratio(&spec)? - 1.0)
    };
    let (mut lo, mut hi) = bracket;
    let (mut f_lo, f_hi) = (excess(lo)?, excess(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() < 1e-10 {
            break;
        }
        let f_mid = excess(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Every figure of merit for one protocol instance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetrologyReport {
    pub qfi_exact: f64,
    pub qfi_asymptotic: f64,
    pub qfi_direct_baseline: f64,
    pub ratio: f64,
    pub skew: f64,
    pub cfi_homodyne: f64,
    #[cfg_attr(feature = "serde", serde(rename = "meanP"))]
    pub mean_p: f64,
    #[cfg_attr(feature = "serde", serde(rename = "varP"))]
    pub var_p: f64,
    pub final_mean_photon: f64,
}

impl MetrologyReport {
    pub fn evaluate(spec: &ProtocolSpec, dtheta: f64) -> Result<Self> {
        let qfi_exact = qfi_exact(spec)?;
        let qfi_direct_baseline = direct_baseline(spec)?;
        let (mean_p, var_p) = spec.final_state(spec.theta0)?.quadrature_stats();
        Ok(Self {
            qfi_exact,
            qfi_asymptotic: qfi_asymptotic(spec)?,
            qfi_direct_baseline,
            ratio: enhancement_ratio(spec)?,
            skew: skew_information(spec)?,
            cfi_homodyne: cfi_homodyne(spec, dtheta)?,
            mean_p,
            var_p,
            final_mean_photon: final_mean_photon(spec)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{encoding_displacement, encoding_frequency};

    const ALPHA: Complex64 = Complex64::new(0.3, 1.0);

    fn qrm(g: f64, t_c: f64, t_theta: f64) -> ProtocolSpec {
        ProtocolSpec::from_model(&ModelParams::qrm_frequency(1.0, g), t_c, t_theta, ALPHA).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn no_preparation_reduces_to_direct_encoding() {
        let spec = qrm(0.96, 0.0, 12.0);
        let f = qfi_exact(&spec).unwrap();
        assert!(rel(f, 4.0 * 144.0 * 1.09) < 1e-13);
        assert_eq!(qfi_asymptotic(&spec).unwrap(), 0.0);
        assert!(rel(direct_baseline(&spec).unwrap(), f) < 1e-13);
        assert!(rel(skew_information(&spec).unwrap(), 1.09) < 1e-13);
    }

    #[test]
    fn commuting_preparation_wastes_time() {
        for &t_c in &[0.5, 3.0, 10.0] {
            let spec = qrm(0.0, t_c, 12.0);
            let want = 144.0 / ((t_c + 12.0) * (t_c + 12.0));
            assert!(rel(enhancement_ratio(&spec).unwrap(), want) < 1e-12);
            assert!(rel(direct_baseline(&spec).unwrap(), 4.0 * (t_c + 12.0).powi(2) * 1.09) < 1e-12);
        }
    }

    #[test]
    fn vacuum_probe_has_no_ratio() {
        let mut spec = qrm(0.9, 1.0, 1.0);
        spec.alpha = Complex64::new(0.0, 0.0);
        assert_eq!(enhancement_ratio(&spec), Err(Error::VacuumProbe));
    }

    #[test]
    fn invalid_protocols() {
        let mut spec = qrm(0.9, 1.0, 1.0);
        spec.t_c = -1.0;
        assert!(qfi_exact(&spec).is_err());
        let mut spec = qrm(0.9, 0.0, 0.0);
        assert!(qfi_exact(&spec).is_err());
        spec.t_theta = 1.0;
        assert_eq!(cfi_homodyne(&spec, 1.0), Err(Error::InvalidStep(1.0)));
        assert_eq!(cfi_homodyne(&spec, 1e-7), Err(Error::InvalidStep(1e-7)));
    }

    #[test]
    fn skew_and_qfi_identity() {
        for &(g, t_c) in &[(0.5, 1.0), (0.9, 4.0), (0.98, 11.0), (0.999, 30.0)] {
            let spec = qrm(g, t_c, 12.0);
            let f = qfi_exact(&spec).unwrap();
            let s = skew_information(&spec).unwrap();
            assert!(rel(4.0 * 144.0 * s, f) < 1e-9, "g={g} t_c={t_c}");
        }
    }

    #[test]
    fn direct_homodyne_on_rotated_coherent_state() {
        // t_c = 0, real α: ∂θ⟨P⟩ = −√2 α t_θ and Var P = ½ stays fixed.
        let alpha = 0.8;
        let t_theta = 3.0;
        let spec = ProtocolSpec::new(
            encoding_frequency(),
            encoding_frequency(),
            0.0,
            t_theta,
            Complex64::new(alpha, 0.0),
        );
        let cfi = cfi_homodyne(&spec, DEFAULT_DTHETA).unwrap();
        assert!(rel(cfi, 4.0 * t_theta * t_theta * alpha * alpha) < 1e-9);
        assert!(cfi <= qfi_exact(&spec).unwrap() * (1.0 + 1e-6));
    }

    #[test]
    fn displacement_closed_forms() {
        let model = ModelParams::qrm_displacement(1.0, 0.9);
        let t_p = 2.5;
        let spec = ProtocolSpec::from_model(&model, 0.0, t_p, ALPHA).unwrap();
        let q = qfi_displacement(&spec).unwrap();
        assert_eq!(q.asymptotic, 0.0);
        assert!(rel(q.exact, 2.0 * t_p * t_p) < 1e-13);

        let dp = 0.19;
        let t_c = PI / (2.0 * libm::sqrt(dp));
        let spec = ProtocolSpec::from_model(&model, t_c, t_p, ALPHA).unwrap();
        let q = qfi_displacement(&spec).unwrap();
        let want = 4.0 * t_p * t_p / dp * 0.5;
        assert!(rel(q.asymptotic, want) < 1e-12);
        assert!(rel(q.exact, want) < 1e-9);
    }

    #[test]
    fn displacement_requires_position_encoding() {
        let spec = qrm(0.9, 1.0, 1.0);
        assert!(qfi_displacement(&spec).is_err());
        let mut spec = spec;
        spec.htheta = encoding_displacement();
        assert!(qfi_displacement(&spec).is_ok());
    }

    #[test]
    fn threshold_without_crossing() {
        let fam = ModelParams::qrm_frequency(1.0, 0.5);
        let r = find_threshold(&fam, 12.0, ALPHA, (0.8, 0.95));
        assert!(matches!(r, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn report_is_consistent() {
        let spec = ProtocolSpec::at_half_period(&ModelParams::qrm_frequency(1.0, 0.95), 12.0, ALPHA)
            .unwrap();
        let r = MetrologyReport::evaluate(&spec, DEFAULT_DTHETA).unwrap();
        assert!(rel(r.skew * 4.0 * 144.0, r.qfi_exact) < 1e-9);
        assert!(r.cfi_homodyne <= r.qfi_exact * (1.0 + 1e-6));
        assert!(rel(r.ratio, r.qfi_exact / r.qfi_direct_baseline) < 1e-14);
        assert!(r.var_p > 0.0);
    }
}
