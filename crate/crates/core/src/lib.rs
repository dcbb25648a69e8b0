//! Numerical toolkit for the p-conductivity equation
//! `div(σ |∇u|^{p-2} ∇u) = 0` and its inverse problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`] holds meshes, conductivity fields with zero / infinite
//!   regions, boundary traces and solver configuration.
//! * [`oned`] is the exact theory on an interval.
//! * [`wolff`] integrates the Wolff ODE and builds the oscillating
//!   p-harmonic plane waves used as probes.
//! * [`solver`] is the P1 variational forward solver.
//! * [`dnmap`] evaluates the weak Dirichlet-to-Neumann pairing.
//! * [`enclosure`] implements the indicator function, support estimation,
//!   hull reconstruction and inclusion classification.
//! * [`identities`] checks the Rellich identity and the monotonicity
//!   inequality on discrete solutions.
//! * [`cli`] drives everything from JSON scenario files.

pub mod cli;
pub mod dnmap;
pub mod domain;
pub mod enclosure;
mod error;
pub mod identities;
pub mod oned;
pub mod solver;
pub mod wolff;

pub use error::{Error, Result};

/// Spatial dimension of the numerical modules.
pub const DIM: usize = 2;
