//! Heralded entanglement of two remote Lambda-level atoms by two-photon
//! detection.
//!
//! Each atom decays from `|e>` to `|+>` or `|->` emitting a circularly
//! polarized photon. Detecting one photon at each of two far-field (or
//! fiber-coupled) detectors behind polarizers projects the atoms onto an
//! entangled ground state whose concurrence is set by the relative phase
//! `delta21` of the two detection channels and the polarizer overlap `V12`.
//!
//! * [`qcore`]: two-qubit states, Wootters concurrence, fidelity.
//! * [`optics`]: Jones vectors, detection operators, heralded state, `G2`.
//! * [`geometry`]: optical phases from atom and detector positions.
//! * [`herald`]: count rates and the state produced by a realistic setup.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod herald;
pub mod optics;
pub mod qcore;
pub mod quadrature;

pub use error::{HeraldError, Result};
