//! State-vector simulation of an interferometric protocol that spatially
//! separates the wave and particle attributes of a single photon.
//!
//! The crate is organised around five layers:
//!
//! * [`hilbert`] — labeled tensor-product spaces, state vectors and dense
//!   complex operators (the numeric substrate).
//! * [`optics`] — the optical-element catalog (PBS, HWP, beam splitters,
//!   phase shifters, the mode permutation, the wave router) and the
//!   wave-particle toolbox that prepares `cos α |W⟩ + sin α |P⟩`.
//! * [`scenario`] — pre/post-selection, the eight arm⊗attribute projectors,
//!   analytic weak values, the analyzer circuit and detector statistics.
//! * [`pointer`] — an independent von-Neumann weak-measurement engine that
//!   recovers the same weak values from a simulated Gaussian pointer.
//! * [`dsl`] — a small line-oriented circuit description language that
//!   compiles to operator pipelines.
//!
//! The core is `no_std` (with `alloc`); IO, CSV output and the CLI live in
//! the companion `wpsim` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dsl;
pub mod hilbert;
pub mod optics;
pub mod pointer;
pub mod scenario;

pub use num_complex::Complex64;

/// Default tolerance for algebraic identities (unitarity, projector checks).
pub const DEFAULT_TOL: f64 = 1e-12;
