//! Numerical engine for two coupled dissipative harmonic oscillators,
//! damped by distinct Ohmic reservoirs or by one common reservoir in the
//! high-temperature regime.
//!
//! The crate assembles the master-equation coefficients, solves the
//! transformed equation in closed form by the method of characteristics,
//! evolves Gaussian superposition states exactly, and quantifies the
//! decoherence of their interference terms. Every closed-form path is
//! cross-validated by independent brute-force oracles (RK4, quadrature,
//! numerical Fourier transforms and a finite-difference residual of the
//! full master equation).
//!
//! Natural units ħ = k_B = 1 throughout.

pub mod cli;
pub mod config;
pub mod decoherence;
pub mod linalg;
pub mod master_eq;
pub mod model;
pub mod normal_modes;
pub mod oracle;
pub mod propagator;
pub mod spectral;

pub use model::{ModelParams, ValidatedModel};
