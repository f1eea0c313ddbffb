//! Spin and field dynamics of an extended charged particle held at rest.
//!
//! The particle is an SO(3)-invariant charge and bare-mass distribution of
//! radius `R`; only its rotation and its electromagnetic field evolve. Two
//! independent solvers are provided: a fixed-point / Volterra solver for the
//! bare spin driven by the retarded self-interaction kernel, and a
//! finite-difference co-simulation of the axisymmetric field coupled to the
//! spin law, which also carries the conservation audits.

pub mod audit;
pub mod error;
pub mod exec;
pub mod field;
pub mod kernel;
pub mod profile;
pub mod quadrature;
pub mod rotor;
pub mod solver;
pub mod vec3;

pub use error::{Error, Result};
pub use exec::Execution;
pub use kernel::{kernel_eval, kernel_norms, kernel_shell_closed_form, KernelNorms, KernelTable};
pub use profile::{ProfileKind, RadialProfile, UnitSystem};
pub use rotor::{magnetic_moment, RotorModel, SpinStateAxial};
pub use vec3::Vec3;
