//! Periodic qubit kick cooling of a nanomechanical resonator.
//!
//! The resonator is described by its phonon populations. Each kick couples
//! it resonantly to a freshly prepared charge qubit for a time `tau`; between
//! kicks it relaxes towards its thermal occupation. The crate provides the
//! kick map, the coarse-grained generator and its transient and steady-state
//! solutions, first-order corrections for an imperfect qubit, a mapping from
//! circuit parameters, and a dense reference implementation for testing.

pub mod cli;
pub mod corrections;
pub mod device;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod oracle;
pub mod units;

pub use diagnostics::{Warned, Warning};
pub use error::{Error, Result};
pub use model::{
    apply_kick, build_kick_map, thermal_distribution, KickMap, PhononDistribution, ProtocolParams,
};
