//! Numerical library and simulator for projective energy measurement of a
//! qubit ensemble through a single collectively coupled probe qubit.
//!
//! The protocol couples one probe qubit to N non-interacting target qubits
//! with unknown frequency offsets, builds an approximate controlled
//! evolution from two conditional pulses around a free-evolution window,
//! and reads the accumulated phase out by recycling the probe through L
//! feedback-rotated measurements. The crate provides:
//!
//! - [`linalg`]: small dense complex matrices, closed-form and
//!   eigendecomposition matrix exponentials, tensor products;
//! - [`model`]: protocol parameters, conditional Hamiltonians, pulse
//!   unitaries and exact gate fidelities;
//! - [`channel`]: the measurement channel in Kraus form, outcome
//!   distributions, post-measurement states, projection error and purity;
//! - [`trajectory`]: the sequential probe-recycled sampler with
//!   measurement feedback;
//! - [`oracle`]: a brute-force dense simulation of the full probe+target
//!   circuit used to certify the factorized fast paths;
//! - [`experiments`]: seeded Monte Carlo sweeps (estimate variance,
//!   projection error, purity) with deterministic parallel evaluation;
//! - [`config`] and [`cli`]: the flat key=value run configuration and the
//!   command-line front end emitting CSV plus a JSON manifest.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
mod mat2;
pub mod model;
pub mod oracle;
pub mod trajectory;

pub use error::{Error, Result};
