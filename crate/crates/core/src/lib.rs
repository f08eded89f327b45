//! Ground-state energies of the lowest-Landau-level-restricted Brown–Ravenhall
//! operator for a one-electron ion in a strong homogeneous magnetic field.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs; IO, configuration and file formats live in the `llr-cli` crate.
//!
//! Layout:
//!
//! - [`specfun`]: modified Bessel functions `K0`/`K1` and Gauss–Legendre based
//!   quadrature rules (finite, semi-infinite, log-scaled).
//! - [`potential`]: the effective one-dimensional Coulomb kernel `V̂0(q)` of the
//!   lowest Landau level, its cache, and the Landau-level weights.
//! - [`spectral`]: Nyström discretisation of the momentum-space eigenvalue
//!   equation with singularity subtraction, and a dense lowest-eigenpair solver.
//! - [`variational`]: the analytic trial state, its energy, and the monotonicity
//!   diagnostics used in the existence argument.
//! - [`scaling`]: the field scaling transform, B-sweeps, the `sqrt(B)` fit and the
//!   small-mass continuity scan.
//!
//! Units are relativistic (`hbar = c = 1`), energies are always quoted with the
//! rest mass subtracted.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "parallel")]
extern crate std;

mod error;
mod kinematics;
mod par;

pub mod eigen;
pub mod potential;
pub mod scaling;
pub mod spectral;
pub mod specfun;
pub mod stats;
pub mod variational;

pub use error::{Error, Result};
pub use kinematics::{coupling, dirac_weight, kinetic, relativistic_energy, spin_weight};
pub use potential::{FieldConfig, PotentialEvaluator};

pub use scaling::{PowerLawFit, SweepRecord};
pub use spectral::{MomentumGrid, SolveOptions, SpectralResult};
pub use variational::TrialState;


/// Fine-structure constant `e^2` in the units used throughout.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.04;

/// Critical coupling `gamma_c = 2/pi`; the operator is bounded below only for
/// `gamma < GAMMA_CRITICAL`.
pub const GAMMA_CRITICAL: f64 = 2.0 / core::f64::consts::PI;

/// `1/sqrt(2 pi)`, the Fourier normalisation that multiplies every kernel.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Converts a nuclear charge to the coupling `gamma = Z e^2`.
pub fn gamma_from_z(z: f64) -> f64 {
    z * FINE_STRUCTURE
}
