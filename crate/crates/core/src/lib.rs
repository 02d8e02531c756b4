//! Multisite tensor network path integrals (MS-TNPI) for the reduced dynamics
//! of spin chains with site-local harmonic baths.
//!
//! The crate is organised around a small dense tensor kernel with named
//! indices ([`tensor`]), matrix-product algebra built on top of it ([`mp`]),
//! the physical model description ([`model`]), the forward-backward TEBD
//! propagator and its temporal factorization ([`propagator`]), the discretized
//! influence functional ([`influence`]), the 2D grid engine itself
//! ([`engine`]), and independent brute-force reference solvers ([`oracle`]).

pub mod engine;
pub mod error;
pub mod influence;
pub mod linalg;
pub mod model;
pub mod mp;
pub mod oracle;
pub mod propagator;
pub mod quad;
pub mod tensor;

pub use error::{Error, Result};

/// Complex scalar used throughout. Forward-backward propagators are complex,
/// so there is no real-only fast path.
pub type C64 = num_complex::Complex64;
