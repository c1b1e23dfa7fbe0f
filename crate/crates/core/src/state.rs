// SPDX-License-Identifier: Apache-2.0

use crate::error::{DaptError, Result};
use crate::linalg::CVector;
use crate::spectrum::SpectralFlow;

/// Basis in which amplitudes are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Lab,
    Snapshot,
}

/// Amplitudes in a declared basis at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    pub basis: Basis,
    pub s: f64,
    pub amplitudes: CVector,
}

impl QuantumState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Converts snapshot amplitudes to the lab basis using the flow's eigenvectors.
    pub fn to_lab(&self, flow: &SpectralFlow, i: usize) -> QuantumState {
        match self.basis {
            Basis::Lab => self.clone(),
            Basis::Snapshot => QuantumState {
                basis: Basis::Lab,
                s: self.s,
                amplitudes: flow.snapshot_matrix(i).mul_vec(&self.amplitudes),
            },
        }
    }

    /// Projects lab amplitudes onto the flow's snapshot eigenvectors.
    pub fn to_snapshot(&self, flow: &SpectralFlow, i: usize) -> QuantumState {
        match self.basis {
            Basis::Snapshot => self.clone(),
            Basis::Lab => QuantumState {
                basis: Basis::Snapshot,
                s: self.s,
                amplitudes: flow.snapshot_matrix(i).adjoint().mul_vec(&self.amplitudes),
            },
        }
    }
}

/// `1 - |<exact|approx>|^2`.
pub fn infidelity(exact: &QuantumState, approx: &QuantumState) -> Result<f64> {
    if exact.basis != approx.basis {
        return Err(DaptError::BasisMismatch(format!(
            "{:?} vs {:?}",
            exact.basis, approx.basis
        )));
    }
    if (exact.s - approx.s).abs() > 1e-12 {
        return Err(DaptError::BasisMismatch(format!(
            "states at s = {} and s = {}",
            exact.s, approx.s
        )));
    }
    if exact.amplitudes.dim() != approx.amplitudes.dim() {
        return Err(DaptError::Shape("states of different dimension".into()));
    }
    let overlap = exact.amplitudes.dot(&approx.amplitudes).norm_sqr();
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}
