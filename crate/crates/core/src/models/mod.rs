// SPDX-License-Identifier: Apache-2.0

//! Test Hamiltonians and reference solutions.

mod four_level;
mod quadratic;

pub use four_level::{gammas, kron, pis, FourLevelModel, NumericFourLevel};
pub use quadratic::QuadraticModel;

pub use crate::state::infidelity;

use crate::error::{DaptError, Result};
use crate::linalg::{CMatrix, CVector, GridValue, UniformGrid, C64};
use crate::spectrum::HamiltonianPath;
use crate::state::{Basis, QuantumState};

/// Default step count of the reference Schroedinger integration.
pub const ORACLE_STEPS: usize = 200_000;
/// Largest endpoint change tolerated when the step is halved.
pub const HALVING_TOL: f64 = 1e-9;

/// RK4 solution of `i hbar v dPsi/ds = H(s) Psi` on `n_steps` uniform steps.
///
/// The run is repeated with half the steps; if the endpoints differ by more than
/// [`HALVING_TOL`] the result is rejected.
pub fn integrate_se(
    path: &dyn HamiltonianPath,
    psi0: &CVector,
    n_steps: usize,
) -> Result<Vec<QuantumState>> {
    if psi0.dim() != path.dim() {
        return Err(DaptError::Shape(format!(
            "initial state of dimension {} for a {}-level path",
            psi0.dim(),
            path.dim()
        )));
    }
    if n_steps < 2 || !n_steps.is_multiple_of(2) {
        return Err(DaptError::InvalidArgument(format!(
            "n_steps = {n_steps} must be even and at least 2"
        )));
    }
    let fine = propagate(path, psi0, n_steps)?;
    let coarse = propagate(path, psi0, n_steps / 2)?;
    let change = (&fine[n_steps] - &coarse[n_steps / 2]).norm();
    if change > HALVING_TOL {
        return Err(DaptError::NotConverged { change });
    }
    let n0 = psi0.norm();
    let drift = fine
        .iter()
        .map(|p| (p.norm() - n0).abs())
        .fold(0.0, f64::max);
    if drift > HALVING_TOL {
        return Err(DaptError::NotConverged { change: drift });
    }
    let grid = UniformGrid::unit(n_steps)?;
    Ok(fine
        .into_iter()
        .enumerate()
        .map(|(i, amplitudes)| QuantumState {
            basis: Basis::Lab,
            s: grid.point(i),
            amplitudes,
        })
        .collect())
}

fn propagate(path: &dyn HamiltonianPath, psi0: &CVector, n_steps: usize) -> Result<Vec<CVector>> {
    let grid = UniformGrid::unit(n_steps)?;
    let h = grid.step();
    let k = -crate::linalg::I / (path.hbar() * path.v());
    let f = |ham: &CMatrix, y: &CVector| ham.mul_vec(y).scale(k);
    let mut out = Vec::with_capacity(grid.len());
    out.push(psi0.clone());
    let mut h_start = path.hamiltonian(0.0);
    for i in 0..n_steps {
        let s = grid.point(i);
        let h_mid = path.hamiltonian(s + 0.5 * h);
        let h_end = path.hamiltonian(grid.point(i + 1));
        let y = &out[i];
        let k1 = f(&h_start, y);
        let mut y2 = y.clone();
        y2.add_scaled(0.5 * h, &k1);
        let k2 = f(&h_mid, &y2);
        let mut y3 = y.clone();
        y3.add_scaled(0.5 * h, &k2);
        let k3 = f(&h_mid, &y3);
        let mut y4 = y.clone();
        y4.add_scaled(h, &k3);
        let k4 = f(&h_end, &y4);
        let mut next = y.clone();
        next.add_scaled(h / 6.0, &k1);
        next.add_scaled(h / 3.0, &k2);
        next.add_scaled(h / 3.0, &k3);
        next.add_scaled(h / 6.0, &k4);
        out.push(next);
        h_start = h_end;
    }
    Ok(out)
}

/// Exact state `exp(-i E s / (hbar v)) psi0` for a constant diagonal Hamiltonian; used in tests.
pub fn constant_diagonal_evolution(
    energies: &[f64],
    psi0: &CVector,
    s: f64,
    v: f64,
    hbar: f64,
) -> CVector {
    CVector::from_vec(
        energies
            .iter()
            .zip(psi0.iter())
            .map(|(&e, &c)| (-crate::linalg::I * (e * s / (hbar * v))).exp() * c)
            .collect::<Vec<C64>>(),
    )
}
