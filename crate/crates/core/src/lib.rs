//! Simulation and analysis of a three-party secret-sharing protocol over
//! noisy qubit channels.
//!
//! Three parties share a GHZ state; Alice encodes two classical bits with a
//! local Pauli, and Bob can recover them only with Charlie's announced
//! measurement outcome. When the qubits travel through phase-damping
//! channels the shared state turns mixed and the recovery becomes
//! probabilistic; the crate provides both the analytic figures of merit and
//! a seeded Monte Carlo engine to estimate them empirically.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, tensor product, partial trace,
//!   trace norm, density-matrix checks.
//! - [`states`]: GHZ and Bell states, Pauli operators, encoding unitaries.
//! - [`channels`]: the Kraus-channel catalogue, channel application and
//!   branch sampling, structure classification.
//! - [`measurement`]: single-qubit and Bell measurements, parity
//!   projectors, binary POVM discrimination and the Helstrom oracle.
//! - [`protocol`]: the protocol engine, decoding table, analytic formulas,
//!   closed-form reference states and Monte Carlo campaigns.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod protocol;
pub mod states;

pub use error::{Error, Result};
