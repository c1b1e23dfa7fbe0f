// SPDX-License-Identifier: Apache-2.0

//! Dynamical phases and Wilczek-Zee transport of each eigenspace.

use rayon::prelude::*;

use crate::error::{DaptError, Result};
use crate::linalg::{cumulative_trapezoid, nearest_unitary, CMatrix};
use crate::spectrum::{MField, SpectralFlow};

/// Steps between re-projections onto the unitary group.
pub const REUNITARIZE_EVERY: usize = 32;
/// Largest tolerated drift from unitarity before a re-projection.
pub const MAX_DRIFT: f64 = 1e-6;

/// `omega_n(s) = (1/hbar) int_0^s E_n`, indexed `[n][i]`.
pub fn dynamical_phase(flow: &SpectralFlow) -> Result<Vec<Vec<f64>>> {
    (0..flow.n_blocks())
        .map(|n| {
            let e: Vec<f64> = (0..flow.len())
                .map(|i| flow.energy(n, i) / flow.hbar)
                .collect();
            cumulative_trapezoid(&e, flow.step())
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct WzTransport {
    /// `u[n][i] = U^n(s_i)`.
    pub u: Vec<Vec<CMatrix>>,
    /// `omega[n][i] = omega_n(s_i)`.
    pub omega: Vec<Vec<f64>>,
    pub u0: Vec<CMatrix>,
}

impl WzTransport {
    pub fn get(&self, n: usize, i: usize) -> &CMatrix {
        &self.u[n][i]
    }

    /// Largest `|U^dagger U - 1|` entry over all blocks and grid points.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.u
            .iter()
            .flatten()
            .map(CMatrix::unitarity_defect)
            .fold(0.0, f64::max)
    }
}

/// `U^n(0) = 1` for every block.
pub fn identity_u0(flow: &SpectralFlow) -> Vec<CMatrix> {
    flow.d_list.iter().map(|&d| CMatrix::identity(d)).collect()
}

/// Integrates `dU^n/ds = -U^n M^{nn}` with RK4 for every block.
pub fn wz_transport(flow: &SpectralFlow, mfield: &MField, u0: &[CMatrix]) -> Result<WzTransport> {
    let nb = flow.n_blocks();
    if u0.len() != nb {
        return Err(DaptError::Shape(format!(
            "{} initial unitaries for {nb} blocks",
            u0.len()
        )));
    }
    for (n, u) in u0.iter().enumerate() {
        if u.rows() != flow.d_list[n] || !u.is_square() {
            return Err(DaptError::Shape(format!(
                "initial unitary of block {n} has shape {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let drift = u.unitarity_defect();
        if drift > MAX_DRIFT {
            return Err(DaptError::InvalidArgument(format!(
                "initial matrix of block {n} is not unitary ({drift:.3e})"
            )));
        }
    }
    let omega = dynamical_phase(flow)?;
    let u = (0..nb)
        .into_par_iter()
        .map(|n| transport_block(flow, &mfield.blocks[n][n], &u0[n], n))
        .collect::<Result<_>>()?;
    Ok(WzTransport {
        u,
        omega,
        u0: u0.to_vec(),
    })
}

fn transport_block(
    flow: &SpectralFlow,
    m: &[CMatrix],
    u0: &CMatrix,
    block: usize,
) -> Result<Vec<CMatrix>> {
    let h = flow.step();
    let mut out = Vec::with_capacity(flow.len());
    out.push(u0.clone());
    let rhs = |u: &CMatrix, a: &CMatrix| -> CMatrix { -&u.matmul(a) };
    for i in 0..flow.len() - 1 {
        let y = &out[i];
        let mid = (&m[i] + &m[i + 1]).scale_re(0.5);
        let k1 = rhs(y, &m[i]);
        let k2 = rhs(&(y + &k1.scale_re(0.5 * h)), &mid);
        let k3 = rhs(&(y + &k2.scale_re(0.5 * h)), &mid);
        let k4 = rhs(&(y + &k3.scale_re(h)), &m[i + 1]);
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(2.0);
        let mut next = y + &incr.scale_re(h / 6.0);
        if (i + 1) % REUNITARIZE_EVERY == 0 || i + 2 == flow.len() {
            let drift = next.unitarity_defect();
            if drift > MAX_DRIFT {
                return Err(DaptError::UnitarityDrift {
                    s: flow.s(i + 1),
                    block,
                    drift,
                });
            }
            next = nearest_unitary(&next)?;
        }
        out.push(next);
    }
    Ok(out)
}
