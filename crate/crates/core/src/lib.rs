//! Fault-tolerance toolkit for repetition-code gadgets under biased noise.
//!
//! - [`pauli`]: single- and two-qubit Paulis, CPHASE conjugation, frames.
//! - [`gadgets`]: time-stepped circuits for the encoded operations.
//! - [`noise`]: the local stochastic biased noise model and its sampler.
//! - [`sim`]: Pauli-frame propagation, Monte Carlo and exact enumeration.
//! - [`bounds`]: closed-form failure bounds and the threshold search.
//! - [`cli`]: the `bft` command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod gadgets;
pub mod noise;
pub mod pauli;
pub mod sim;

pub use error::{Error, Result};
