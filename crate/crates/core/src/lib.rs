//! Birkhoff sums of observables over expanding interval maps and hyperbolic
//! toral automorphisms, treated as distributions: primitives, regularity
//! diagnostics, transfer-operator spectra and asymptotic variance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birkhoff;
pub mod dynamics;
pub mod error;
pub mod lateral;
pub mod piecewise;
pub mod regularity;
pub mod stats;
pub mod system;
pub mod torus;
pub mod transfer;
pub mod variance;

pub use error::{Error, Result};
pub use lateral::{LateralPoint, Side};
pub use piecewise::C64;
