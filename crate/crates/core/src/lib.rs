//! Spectral solver for the (2+1)-dimensional Dirac oscillator in a uniform
//! magnetic field with first-order minimal-length (GUP) corrections.
//!
//! Operators live on a truncated two-mode Fock space tensored with a
//! two-component spinor. First-order perturbative shifts are cross-checked
//! against finite-difference slopes of an exact diagonalization.

pub mod cli;
pub mod error;
pub mod fock;
pub mod model;
pub mod numerics;
pub mod perturbation;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
