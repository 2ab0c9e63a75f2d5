//! Numerical laboratory for the one-dimensional Anderson–Bernoulli model
//! H = Δ + λV with i.i.d. ±1 potential.
//!
//! The crate is organised bottom-up: exact arithmetic on the coupling
//! ([`numberfield`]), SL₂ cocycles and the projective action ([`cocycle`]),
//! the Fourier–Galerkin averaging operator ([`transferop`]), Lyapunov/IDS
//! estimators ([`spectrum`]) and stationary measures ([`measures`]).

pub mod cocycle;
pub mod measures;
pub mod numberfield;
pub mod seeds;
pub mod spectrum;
pub mod stats;
pub mod transferop;
