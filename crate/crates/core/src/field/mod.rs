//! Electromagnetic field quantities for the particle at rest.

pub mod functionals;
pub mod grid;
pub mod kirchhoff;
pub mod pulse;
pub mod source;

pub use functionals::{FieldEnergy, FieldProbe};
pub use grid::{cfl_limit, AxisymmetricFieldGrid, GridSpec, LinearFunctional};
pub use kirchhoff::{kirchhoff_wave, Kirchhoff, WaveTorque};
pub use pulse::{PulseShape, ShellBump, WavePulse};
pub use source::{coulomb_potential, source_potential, OmegaHistory, StaticStream};

use crate::profile::RadialProfile;

/// Axis component of ∫ x × 𝒜_wave(x, t) f_e d³x with default quadrature.
pub fn wave_torque(pulse: &WavePulse, charge: &RadialProfile, t: f64) -> crate::Result<f64> {
    WaveTorque::for_profile(charge).eval(pulse, t)
}
