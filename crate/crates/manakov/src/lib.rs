//! Dual-engine simulator for trains of two-component (vector) NLS solitons
//! moving through shallow sech^2 wells and humps.
//!
//! The crate offers two independent views of the same physics:
//!
//! * [`vnlse`] — a Crank–Nicolson solver for the full coupled PDE, with
//!   [`tracking`] to extract soliton-peak trajectories from the field.
//! * [`ctc`] — a reduced ODE model (a perturbed complex Toda chain) that
//!   evolves one complex eigenvalue and one complex coordinate per soliton.
//!
//! [`lax`] classifies the asymptotic regime of a train (free spreading,
//! bound oscillation, or a mixture) from the eigenvalues of a small
//! tridiagonal Lax matrix, before any time integration is run.
//! [`harness`] ties the engines together: scenario files, canned presets,
//! result directories, and trajectory comparison metrics.

pub mod config;
pub mod ctc;
pub mod error;
pub mod harness;
pub mod io;
pub mod lax;
pub mod potential;
pub mod soliton;
pub mod tracking;
pub mod vnlse;

pub use error::{Error, Result};
