//! Criticality-assisted noncommutative preparation (CANP) metrology.
//!
//! A probe is first evolved under a critical preparation Hamiltonian `Hc`
//! and then acquires the unknown parameter through `exp(−iθ t_θ Hθ)`. When
//! the pair satisfies `[Hc, Γ] = √Δ Γ` the local generator has a closed
//! form, and the quantum Fisher information is amplified as `Δ → 0`.
//!
//! The crate is `no_std` and allocation free:
//!
//! - [`algebra`]: the six-dimensional algebra of quadratic operators,
//!   the criterion check and the generator.
//! - [`gaussian`]: exact Gaussian-state dynamics and moments.
//! - [`metrology`]: quantum and classical Fisher information, skew
//!   information, the resource-constrained enhancement ratio and threshold
//!   search.
//! - [`presets`]: effective Rabi and Lipkin-Meshkov-Glick models.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod metrology;
pub mod presets;

pub use algebra::{
    commutator, derive_critical_structure, generator, to_quadrature_form, CriticalStructure,
    QuadraticOperator, QuadratureForm,
};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, PhaseSpaceMap};
pub use metrology::{
    cfi_homodyne, direct_baseline, enhancement_ratio, final_mean_photon, find_threshold,
    qfi_asymptotic, qfi_displacement, qfi_exact, skew_information, MetrologyReport, ProtocolSpec,
};
pub use num_complex::Complex64;
pub use presets::{ModelParams, ModelVariant};
