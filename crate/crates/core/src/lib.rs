//! Simulation of energy Bloch oscillations in periodically driven and tilted quantum systems.
//!
//! The crate is organised bottom-up: [`linalg`] holds states, Hermitian
//! operators and eigensolvers; [`models`] builds the three Hamiltonian
//! families; [`adiabatic`] works in the instantaneous eigenbasis;
//! [`propagator`] integrates the Schrödinger equation; [`experiments`]
//! runs scenarios and writes result bundles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod models;
pub mod propagator;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
