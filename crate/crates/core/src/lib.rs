//! Deterministic DC simulator for memristor-enhanced analogue logic gates.
//!
//! The crate models reconfigurable gates in which programmable resistors set
//! the analogue transfer characteristics of otherwise digital CMOS
//! topologies. It provides:
//!
//! - compact device models with analytic Jacobian contributions ([`devices`]),
//! - gate netlist builders and structural validation ([`netlist`]),
//! - a damped-Newton nodal DC solver with sweeps, surfaces and plateau
//!   metrics ([`solver`]),
//! - a charge/energy model of the equivalent resistive divider ([`energy`]),
//! - a current-based read-out and digitization stage ([`readout`]),
//! - template-matching texel arrays built from programmable inverters
//!   ([`texel`]),
//! - the spike-waveform sampling and matching pipeline ([`spikesort`]).
//!
//! All operations are deterministic: identical inputs produce bit-identical
//! outputs.

pub mod devices;
pub mod energy;
pub mod error;
pub mod netlist;
pub mod readout;
pub mod solver;
pub mod spikesort;
pub mod texel;

pub use devices::{MemristorState, MosfetConductances, MosfetParams, Polarity};
pub use error::{Error, Result};
