//! Simulation and verification of multiqubit gates built from cavity-QED pulse
//! primitives: a Raman photon emitter, Raman absorbers, dispersive phase
//! targets and resonant single-qubit pulses sharing one cavity mode.

pub mod budget;
pub mod config;
pub mod dj;
pub mod error;
pub mod hamiltonians;
pub mod primitives;
pub mod quantum;
pub mod sequencer;
pub mod verification;

pub use error::{Error, Result};
