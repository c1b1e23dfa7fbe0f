// SPDX-License-Identifier: Apache-2.0

//! Degenerate adiabatic perturbation theory.
//!
//! The pipeline is: sample a [`spectrum::HamiltonianPath`] into a gauge-smoothed
//! [`spectrum::SpectralFlow`], derive the coupling field [`spectrum::MField`],
//! transport each eigenspace with its Wilczek-Zee unitary ([`phases`]), then build
//! the correction hierarchy and assemble states ([`dapt`]). [`models`] supplies
//! test Hamiltonians with independent reference solutions and [`conditions`]
//! evaluates the adiabaticity criteria.

pub mod conditions;
pub mod dapt;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod models;
pub mod phases;
pub mod spectrum;
pub mod state;

pub use error::{DaptError, Result};
