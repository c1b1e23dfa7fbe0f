// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs: infidelity curves against a reference solution and condition
//! reports, each sampled on a fixed number of output rows.

use std::f64::consts::SQRT_2;

use crate::conditions::{self, ConditionReport};
use crate::dapt::{self, CoeffSet};
use crate::error::{DaptError, Result};
use crate::linalg::{eigh, CMatrix, C64};
use crate::models::{integrate_se, FourLevelModel, QuadraticModel};
use crate::phases::{identity_u0, wz_transport, WzTransport};
use crate::spectrum::{build_flow, m_field, HamiltonianPath, MField, SpectralFlow};
use crate::state::{infidelity, Basis, QuantumState};

/// Rows written per curve, independent of the internal grid.
pub const OUTPUT_ROWS: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    FourLevel(FourLevelModel),
    Quadratic(QuadraticModel),
}

impl HamiltonianPath for Model {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        match self {
            Model::FourLevel(m) => m.hamiltonian(s),
            Model::Quadratic(m) => m.hamiltonian(s),
        }
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        match self {
            Model::FourLevel(m) => m.derivative(s),
            Model::Quadratic(m) => m.derivative(s),
        }
    }

    fn analytic_basis(&self, s: f64) -> Option<Vec<(f64, CMatrix)>> {
        match self {
            Model::FourLevel(m) => m.analytic_basis(s),
            Model::Quadratic(m) => m.analytic_basis(s),
        }
    }

    fn v(&self) -> f64 {
        match self {
            Model::FourLevel(m) => m.v,
            Model::Quadratic(m) => m.v,
        }
    }

    fn hbar(&self) -> f64 {
        match self {
            Model::FourLevel(m) => m.hbar,
            Model::Quadratic(m) => m.hbar,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub n_steps: usize,
    pub p_max: usize,
    /// Clustering tolerance; `None` means `1e-8 * max |E(0)|`.
    pub deg_tol: Option<f64>,
    /// Minimum step count of the reference integration.
    pub oracle_steps: usize,
    pub margin: f64,
    pub null_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            n_steps: 4000,
            p_max: dapt::DEFAULT_P_MAX,
            deg_tol: None,
            oracle_steps: crate::models::ORACLE_STEPS,
            margin: conditions::DEFAULT_MARGIN,
            null_tol: conditions::DEFAULT_NULL_TOL,
        }
    }
}

/// `1e-8 * max |E|` at `s = 0`.
pub fn default_deg_tol(path: &dyn HamiltonianPath) -> Result<f64> {
    let e = eigh(&path.hamiltonian(0.0))?;
    let scale = e.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(if scale > 0.0 { 1e-8 * scale } else { 1e-8 })
}

/// Spectral flow, coupling field and transport for one path.
pub struct Pipeline {
    pub flow: SpectralFlow,
    pub mfield: MField,
    pub wz: WzTransport,
}

impl Pipeline {
    pub fn new(path: &dyn HamiltonianPath, n_steps: usize, deg_tol: Option<f64>) -> Result<Self> {
        let tol = match deg_tol {
            Some(t) => t,
            None => default_deg_tol(path)?,
        };
        let flow = build_flow(path, n_steps, tol)?;
        let mfield = m_field(&flow, path)?;
        let wz = wz_transport(&flow, &mfield, &identity_u0(&flow))?;
        Ok(Self { flow, mfield, wz })
    }

    /// Coefficients up to `p_max` for a start in `|0^0(0)>`.
    pub fn coefficients(&self, p_max: usize) -> Result<CoeffSet> {
        dapt::compute(
            &self.flow,
            &self.mfield,
            &self.wz,
            &dapt::ground_start(&self.flow),
            p_max,
        )
    }
}

/// Grid indices nearest to `OUTPUT_ROWS` uniformly spaced values of `s`.
pub fn output_indices(n_steps: usize) -> Vec<usize> {
    let last = (OUTPUT_ROWS - 1) as f64;
    (0..OUTPUT_ROWS)
        .map(|j| (j as f64 * n_steps as f64 / last).round() as usize)
        .collect()
}

/// `2 sqrt 2 hbar v / min gap`, which equals the quadratic model's `sqrt 2 hbar v / E`.
pub fn epsilon(flow: &SpectralFlow, i: usize) -> f64 {
    2.0 * SQRT_2 * flow.hbar * flow.v / flow.min_gap(i)
}

#[derive(Clone, Debug)]
pub struct InfidelityTable {
    pub s: Vec<f64>,
    /// `infidelity[k][row]` for truncation order `k`.
    pub infidelity: Vec<Vec<f64>>,
    pub epsilon: Vec<f64>,
    pub norm_exact: Vec<f64>,
    /// `epsilon` evaluated at the smallest gap on the internal grid.
    pub epsilon_min_gap: f64,
}

impl InfidelityTable {
    /// Largest infidelity over all rows for order `k`.
    pub fn max_infidelity(&self, k: usize) -> f64 {
        self.infidelity[k].iter().copied().fold(0.0, f64::max)
    }
}

/// Reference states in the lab frame at the given internal grid indices.
fn reference_states(
    model: &Model,
    pipe: &Pipeline,
    rows: &[usize],
    settings: &Settings,
) -> Result<Vec<QuantumState>> {
    let flow = &pipe.flow;
    match model {
        Model::FourLevel(m) => Ok(rows
            .iter()
            .map(|&i| {
                let s = flow.s(i);
                QuantumState {
                    basis: Basis::Lab,
                    s,
                    amplitudes: m.exact_lab(s / m.v),
                }
            })
            .collect()),
        Model::Quadratic(m) => {
            let n = settings.n_steps;
            let mut ratio = settings.oracle_steps.div_ceil(n).max(1);
            if !(ratio * n).is_multiple_of(2) {
                ratio += 1;
            }
            let traj = integrate_se(m, &m.initial_state(), ratio * n)?;
            Ok(rows
                .iter()
                .map(|&i| {
                    let mut st = traj[ratio * i].clone();
                    st.s = flow.s(i);
                    st
                })
                .collect())
        }
    }
}

fn validate(settings: &Settings) -> Result<()> {
    if settings.p_max > dapt::MAX_ORDER_CAP {
        return Err(DaptError::OrderExceeded {
            requested: settings.p_max,
            max: dapt::MAX_ORDER_CAP,
        });
    }
    Ok(())
}

/// Infidelity of every truncation order against the model's reference solution.
pub fn run_infidelity(model: &Model, settings: &Settings) -> Result<InfidelityTable> {
    validate(settings)?;
    let pipe = Pipeline::new(model, settings.n_steps, settings.deg_tol)?;
    let coeffs = pipe.coefficients(settings.p_max)?;
    let flow = &pipe.flow;
    let rows = output_indices(settings.n_steps);
    let exact = reference_states(model, &pipe, &rows, settings)?;

    let mut infid = vec![Vec::with_capacity(rows.len()); settings.p_max + 1];
    for (&i, ex) in rows.iter().zip(&exact) {
        let basis = flow.snapshot_matrix(i);
        let mut acc = crate::linalg::CVector::zeros(flow.dim);
        let mut vp = 1.0;
        for (k, col) in infid.iter_mut().enumerate() {
            acc.axpy(
                C64::from(vp),
                &dapt::order_amplitudes(&coeffs, flow, k, 0, i),
            );
            vp *= flow.v;
            let approx = QuantumState {
                basis: Basis::Lab,
                s: flow.s(i),
                amplitudes: basis.mul_vec(&acc.normalized()),
            };
            col.push(infidelity(ex, &approx)?);
        }
    }
    let epsilon_min_gap = (0..flow.len())
        .map(|i| epsilon(flow, i))
        .fold(0.0, f64::max);
    Ok(InfidelityTable {
        s: rows.iter().map(|&i| flow.s(i)).collect(),
        infidelity: infid,
        epsilon: rows.iter().map(|&i| epsilon(flow, i)).collect(),
        norm_exact: exact.iter().map(QuantumState::norm).collect(),
        epsilon_min_gap,
    })
}

/// Condition values on the output rows plus verdicts taken over the full grid.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub rows: ConditionReport,
    pub necessary: bool,
    pub sufficient: bool,
}

pub fn run_conditions(model: &dyn HamiltonianPath, settings: &Settings) -> Result<CheckResult> {
    validate(settings)?;
    let pipe = Pipeline::new(model, settings.n_steps, settings.deg_tol)?;
    let full = conditions::evaluate(
        &pipe.flow,
        &pipe.mfield,
        &pipe.wz,
        settings.margin,
        settings.null_tol,
    )?;
    let rows = output_indices(settings.n_steps);
    let pick = |v: &[f64]| rows.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let rows = ConditionReport {
        t: pick(&full.t),
        nec_strong: pick(&full.nec_strong),
        nec_weak: pick(&full.nec_weak),
        suf_a_lhs: pick(&full.suf_a_lhs),
        suf_a_rhs: pick(&full.suf_a_rhs),
        suf_b_lhs: full
            .suf_b_lhs
            .iter()
            .map(|blk| blk.iter().map(|g| pick(g)).collect())
            .collect(),
        suf_b_lhs_max: pick(&full.suf_b_lhs_max),
        suf_b_rhs: pick(&full.suf_b_rhs),
        margin: full.margin,
        null_tol: full.null_tol,
    };
    Ok(CheckResult {
        rows,
        necessary: full.necessary_passed(),
        sufficient: full.sufficient_passed(),
    })
}
