//! Free-particle Dirac wavepackets with an arbitrary, independently chosen
//! group velocity.
//!
//! A packet is a superposition of positive-energy plane waves whose
//! longitudinal momentum is tied to the transverse momentum so that every
//! component satisfies `E = v_a p3 + κ`. The crate builds such spectra,
//! evaluates the resulting field by direct quadrature, by the closed-form
//! paraxial solution and by exact spectral propagation, and measures
//! peak velocity, velocity expectation and profile stability on the result.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correlation;
pub mod diagnostics;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod kinematics;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
