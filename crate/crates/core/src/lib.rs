//! Numerical simulator for traditional STIRAP and two-photon-transition
//! superadiabatic STIRAP (sa-STIRAP) in a three-level V system.
//!
//! All internal frequencies are angular (rad/μs) and times are in μs.
//! Matrices and state vectors use the fixed basis order `(|0⟩, |−1⟩, |+1⟩)`,
//! see [`hamiltonian::Level`].

pub mod cli_io;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod linalg;
pub mod propagator;
pub mod pulses;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// 3×3 complex matrix in the fixed basis order.
pub type Mat3 = nalgebra::Matrix3<C64>;
/// 3-component complex column vector.
pub type Vec3 = nalgebra::Vector3<C64>;
