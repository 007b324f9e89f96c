//! Counterdiabatic (transitionless) driving toolkit.
//!
//! A time-dependent Hamiltonian H(t) transports its instantaneous eigenstates
//! exactly when an auxiliary field H^A(t) built from the tangent couplings
//! <m_t|d/dt n_t> is added. This crate constructs that field — for all levels
//! at once (collective driving) or for a single protected level (individual
//! driving) — and evaluates what it costs and how fast the state moves:
//!
//! - [`linalg`]: dense complex matrices and a deterministic Hermitian
//!   eigensolver for dimensions up to 16;
//! - [`spin`]: angular-momentum operators and y-rotations;
//! - [`model`]: time-dependent Hamiltonians, the linearly swept three-level
//!   Landau-Zener model, and its closed-form rotation-angle oracle;
//! - [`adiabatic`]: spectral frames and tangent couplings;
//! - [`cdrive`]: collective and individual auxiliary Hamiltonians;
//! - [`costspeed`]: cost rates, Fubini-Study and quantum-Fisher metrics,
//!   evolution speeds, speed-cost relations, Gibbs ensembles, Uhlmann
//!   fidelity;
//! - [`dynamics`]: fixed-step RK4 propagation and eigenstate tracking;
//! - [`nvframe`]: lab-frame pulse synthesis, rotating-frame transform, and
//!   rotating-wave-approximation checks for a spin-1 ground triplet;
//! - [`sweep`], [`fuzz`]: data-parallel sweep evaluation and randomized
//!   relation checking (rayon-backed with the default `parallel` feature,
//!   plain loops without it; outputs are identical).
//!
//! Internal units: hbar = 1, energies in units of the sweep rate kappa, time
//! in 1/kappa.

pub mod adiabatic;
pub mod cdrive;
pub mod costspeed;
pub mod dynamics;
mod error;
pub mod fuzz;
pub mod linalg;
pub mod model;
pub mod nvframe;
mod parallel;
pub mod spin;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
