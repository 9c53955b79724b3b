//! State-vector toolkit for post-selected interference experiments.
//!
//! The crate models small composite quantum systems whose subsystems carry
//! named basis labels (paths, detector readouts, spins, photon flags). Pure
//! states are sparse amplitude maps over the joint basis; unitary steps are
//! splitters, rotations, controlled relabelings and phases, all recorded in an
//! invertible [`evolve::OpLog`]. Measurement covers projective post-selection,
//! two-outcome partial measurement with erasure, and weak measurement against a
//! discretized Gaussian pointer. [`entangle`] turns bipartite entanglement into
//! numbers so that an entanglement timeline can be asserted, and [`grid`]
//! handles 1D wavefunctions and their momentum spectra.
//!
//! [`scenarios`] strings these together into reproducible, self-checking
//! experiment scripts.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod linalg;

pub mod entangle;
pub mod evolve;
pub mod grid;
pub mod measure;
pub mod register;
pub mod scenarios;

pub use error::{Error, Result};
pub use register::{new_register, Register, StateVector, SubsystemSpec};

/// Double-precision complex amplitude.
pub type C64 = num_complex::Complex64;

/// Tolerance used for normalization and unitarity checks.
pub const NORM_TOLERANCE: f64 = 1e-10;
