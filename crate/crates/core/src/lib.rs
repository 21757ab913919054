//! Dual-pairing summation-by-parts (DP-SBP) discretizations of the inviscid
//! Burgers and shallow water equations, with tools for linear stability
//! analysis of the resulting semi-discrete systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`operators`] builds single-element operator pairs `(D+, D-, H)` and audits
//!   the SBP axioms.
//! - [`multiblock`] glues elements together with weak periodic interface
//!   penalties.
//! - [`burgers`] and [`swe`] implement the entropy-stable split-form schemes.
//! - [`linearization`] differentiates any right-hand side with dual numbers and
//!   computes its eigen-spectrum.
//! - [`timeint`] provides SSPRK(5,4).
//! - [`diagnostics`] has norms, entropy, vorticity and turbulence spectra.
//! - [`experiments`] wires everything into reproducible runs driven by the
//!   `dpsbp` binary.

pub mod burgers;
pub mod dense;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod linearization;
pub mod multiblock;
pub mod operators;
pub mod scalar;
pub mod swe;
pub mod timeint;

pub use dense::Dense;
pub use error::{Error, Result};
pub use multiblock::{GlobalOperator, Mesh1D};
pub use operators::{Family, OperatorPair};
pub use scalar::{Dual, Scalar};
