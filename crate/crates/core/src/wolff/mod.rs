//! Oscillatory p-harmonic plane waves built from the Wolff ODE.

pub mod ode;
mod probe;
mod wave;

pub use probe::{p_harmonicity_residual, plane_wave, ProbeParams};
pub use wave::{detect_period, exact_period, integrate_wave, integrate_wave_with, wolff_potential, wolff_rhs, WaveOptions, WolffWave};
