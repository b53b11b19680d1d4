//! Neighboring optimal control (NOC) for twisted-rapid-passage (TRP) gates.
//!
//! A TRP sweep produces a good but imperfect gate. NOC linearizes the
//! Schrödinger dynamics about that sweep and computes a small control
//! correction `Δf(τ)` that moves the final propagator onto the target.
//!
//! Modules:
//! - [`lincore`]: dense complex linear algebra and vectorization.
//! - [`control`]: sweep parameters, Hamiltonians, couplings, drive matrix.
//! - [`propagate`]: RK4 propagation of `U(τ)` and of the Strategy-2 state.
//! - [`metrics`]: targets, `Tr P`, `d*`, fidelity, target offset.
//! - [`noc`]: the two control strategies and the improvement pipeline.
//! - [`noise`]: shot-noise phase jitter.
//! - [`spectral`]: control spectra and bandwidth.
//! - [`sensitivity`]: last-digit parameter perturbations.
//! - [`harness`]: configuration, experiments and CSV output.

pub mod control;
pub mod error;
pub mod harness;
pub mod lincore;
pub mod metrics;
pub mod noc;
pub mod noise;
pub mod propagate;
pub mod sensitivity;
pub mod spectral;

pub use error::{Error, Result};
