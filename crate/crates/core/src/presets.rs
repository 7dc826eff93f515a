//! Effective quadratic Hamiltonians of the quantum Rabi and
//! Lipkin-Meshkov-Glick models, and the encoding generators used with them.
//!
//! Constants generated by normal-ordering are kept in the identity
//! coefficient. The qubit offset `−ω₀/2` of the Rabi model is not
//! represented; it only contributes a global phase.

use num_complex::Complex64;

use crate::algebra::QuadraticOperator;
use crate::error::{Error, Result};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `ω a†a − (ωg²/4)(a† + a)²` in the normal phase `0 ≤ g < 1`.
pub fn qrm_effective(omega: f64, g: f64) -> Result<QuadraticOperator> {
    if !(0.0..1.0).contains(&g) || !(omega > 0.0) {
        return Err(Error::OutOfPhase);
    }
    let k = 0.25 * omega * g * g;
    Ok(QuadraticOperator {
        n: real(omega - 2.0 * k),
        aa: real(-k),
        adad: real(-k),
        one: real(-k),
        ..QuadraticOperator::ZERO
    })
}

/// `2λ a†a + [γ(a† − a)² − (a + a†)²]/2`, valid while `(γ − λ)(1 − λ) > 0`.
///
/// The effective description assumes `⟨a†a⟩ ≪ N` for the underlying spin
/// number `N`; nothing here can check that.
pub fn lmg_effective(lambda: f64, gamma: f64) -> Result<QuadraticOperator> {
    if !((gamma - lambda) * (1.0 - lambda) > 0.0) {
        return Err(Error::OutOfPhase);
    }
    Ok(QuadraticOperator {
        n: real(2.0 * lambda - (gamma + 1.0)),
        aa: real(0.5 * (gamma - 1.0)),
        adad: real(0.5 * (gamma - 1.0)),
        one: real(-0.5 * (gamma + 1.0)),
        ..QuadraticOperator::ZERO
    })
}

/// `Hθ = a†a`.
pub fn encoding_frequency() -> QuadraticOperator {
    QuadraticOperator::number()
}

/// `Hp = (a† + a)/√2`.
pub fn encoding_displacement() -> QuadraticOperator {
    QuadraticOperator::position()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ModelVariant {
    QrmFrequency,
    QrmDisplacement,
    LmgFrequency,
}

/// A model instance. `g` is read by the Rabi variants, `lambda` and `gamma`
/// by the LMG variant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ModelParams {
    pub variant: ModelVariant,
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub omega: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub g: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub lambda: f64,
    #[cfg_attr(feature = "serde", serde(default = "two"))]
    pub gamma: f64,
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

#[cfg(feature = "serde")]
fn two() -> f64 {
    2.0
}

impl ModelParams {
    pub fn qrm_frequency(omega: f64, g: f64) -> Self {
        Self {
            variant: ModelVariant::QrmFrequency,
            omega,
            g,
            lambda: 0.0,
            gamma: 2.0,
        }
    }

    pub fn qrm_displacement(omega: f64, g: f64) -> Self {
        Self {
            variant: ModelVariant::QrmDisplacement,
            ..Self::qrm_frequency(omega, g)
        }
    }

    pub fn lmg_frequency(lambda: f64, gamma: f64) -> Self {
        Self {
            variant: ModelVariant::LmgFrequency,
            omega: 1.0,
            g: 0.0,
            lambda,
            gamma,
        }
    }

    /// The primary model parameter: `g` for the Rabi variants, `λ` for LMG.
    pub fn control(&self) -> f64 {
        match self.variant {
            ModelVariant::QrmFrequency | ModelVariant::QrmDisplacement => self.g,
            ModelVariant::LmgFrequency => self.lambda,
        }
    }

    pub fn with_control(mut self, value: f64) -> Self {
        match self.variant {
            ModelVariant::QrmFrequency | ModelVariant::QrmDisplacement => self.g = value,
            ModelVariant::LmgFrequency => self.lambda = value,
        }
        self
    }

    pub fn preparation(&self) -> Result<QuadraticOperator> {
        match self.variant {
            ModelVariant::QrmFrequency | ModelVariant::QrmDisplacement => {
                qrm_effective(self.omega, self.g)
            }
            ModelVariant::LmgFrequency => lmg_effective(self.lambda, self.gamma),
        }
    }

    pub fn encoding(&self) -> QuadraticOperator {
        match self.variant {
            ModelVariant::QrmFrequency | ModelVariant::LmgFrequency => encoding_frequency(),
            ModelVariant::QrmDisplacement => encoding_displacement(),
        }
    }

    /// Published closed form of the criticality parameter.
    pub fn delta(&self) -> f64 {
        let w2 = self.omega * self.omega;
        match self.variant {
            ModelVariant::QrmFrequency => 4.0 * w2 * (1.0 - self.g * self.g),
            ModelVariant::QrmDisplacement => w2 * (1.0 - self.g * self.g),
            ModelVariant::LmgFrequency => {
                16.0 * (self.gamma - self.lambda) * (1.0 - self.lambda)
            }
        }
    }

    /// Published `Ĉ` and `D̂` for the frequency-encoding presets.
    pub fn published_c_d(&self) -> Option<(QuadraticOperator, QuadraticOperator)> {
        match self.variant {
            ModelVariant::QrmFrequency => {
                let (w, g2) = (self.omega, self.g * self.g);
                // Ĉ = (iωg²/2)((a†)² − a²)
                let c = QuadraticOperator {
                    aa: Complex64::new(0.0, -0.5 * w * g2),
                    adad: Complex64::new(0.0, 0.5 * w * g2),
                    ..QuadraticOperator::ZERO
                };
                // D̂ = g²ω²[(1 − g²/2)((a†)² + a²) − g²(a†a + ½)]
                let k = g2 * w * w;
                let d = QuadraticOperator {
                    n: real(-k * g2),
                    aa: real(k * (1.0 - 0.5 * g2)),
                    adad: real(k * (1.0 - 0.5 * g2)),
                    one: real(-0.5 * k * g2),
                    ..QuadraticOperator::ZERO
                };
                Some((c, d))
            }
            ModelVariant::LmgFrequency => {
                let (l, y) = (self.lambda, self.gamma);
                // Ĉ = i[H, a†a] = i(γ − 1)(a² − (a†)²)
                let c = QuadraticOperator {
                    aa: Complex64::new(0.0, y - 1.0),
                    adad: Complex64::new(0.0, 1.0 - y),
                    ..QuadraticOperator::ZERO
                };
                // D̂ = 2(γ − 1)[(1 + γ − 2λ)((a†)² + a²) + (1 − γ)(2a†a + 1)]
                let k = 2.0 * (y - 1.0);
                let d = QuadraticOperator {
                    n: real(2.0 * k * (1.0 - y)),
                    aa: real(k * (1.0 + y - 2.0 * l)),
                    adad: real(k * (1.0 + y - 2.0 * l)),
                    one: real(k * (1.0 - y)),
                    ..QuadraticOperator::ZERO
                };
                Some((c, d))
            }
            ModelVariant::QrmDisplacement => None,
        }
    }
}
