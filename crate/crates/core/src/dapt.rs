// SPDX-License-Identifier: Apache-2.0

//! The correction hierarchy `B^{(p)}_{mn}(s)` and assembly of perturbative states.
//!
//! Coefficients are stored without the fast phases `exp(-i omega / v)`; those are
//! applied only in [`assemble_state`]. Block `B^{(p)}_{mn}` is stored as
//! `d_max x d_n`: row `h` is the initial-condition row (rows at or beyond `d_m`
//! carry only what higher orders feed into them), column `g` is the amplitude on
//! `|n^g(s)>`.

use rayon::prelude::*;

use crate::error::{DaptError, Result};
use crate::linalg::{
    cumulative_trapezoid, grid_derivative, CMatrix, CVector, GridValue, C64, I, ZERO,
};
use crate::phases::WzTransport;
use crate::spectrum::{HamiltonianPath, MField, SpectralFlow};
use crate::state::{Basis, QuantumState};

/// Hard upper bound on the perturbative order.
pub const MAX_ORDER_CAP: usize = 8;
/// Default highest order computed.
pub const DEFAULT_P_MAX: usize = 3;
/// Tolerance on `sum_m B^{(p)}_{mn}(0)` for `p >= 1`.
pub const SUM_RULE_TOL: f64 = 1e-8;

/// One order of the hierarchy, `blocks[m][n][i]`.
#[derive(Clone, Debug)]
pub struct Level {
    pub blocks: Vec<Vec<Vec<CMatrix>>>,
}

impl Level {
    pub fn get(&self, m: usize, n: usize, i: usize) -> &CMatrix {
        &self.blocks[m][n][i]
    }

    fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Largest entry of `sum_m B_{mn}(0)` over all `n`.
    pub fn sum_rule_residual(&self) -> f64 {
        let nb = self.n_blocks();
        (0..nb)
            .map(|n| {
                let mut acc = self.blocks[0][n][0].zero_like();
                for m in 0..nb {
                    acc += &self.blocks[m][n][0];
                }
                acc.max_abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct CoeffSet {
    pub levels: Vec<Level>,
    /// Highest order this set may be extended to.
    pub p_max: usize,
    pub b0: Vec<C64>,
    pub u0: Vec<CMatrix>,
    /// Dynamical phases `omega[n][i]`, kept for assembly.
    pub omega: Vec<Vec<f64>>,
    pub v: f64,
    pub d_max: usize,
}

impl CoeffSet {
    /// Highest order computed so far.
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn get(&self, p: usize, m: usize, n: usize, i: usize) -> &CMatrix {
        self.levels[p].get(m, n, i)
    }

    /// `B^{(p)}_{mn}(s_i)` zero-padded to `d_max x d_max`.
    pub fn padded(&self, p: usize, m: usize, n: usize, i: usize) -> CMatrix {
        self.get(p, m, n, i).padded(self.d_max, self.d_max)
    }
}

/// Initial amplitudes `b = (1, 0, ...)`.
pub fn ground_start(flow: &SpectralFlow) -> Vec<C64> {
    let mut b = vec![ZERO; flow.n_blocks()];
    b[0] = C64::from(1.0);
    b
}

fn check_inputs(flow: &SpectralFlow, wz: &WzTransport, b0: &[C64]) -> Result<()> {
    if b0.len() != flow.n_blocks() {
        return Err(DaptError::Shape(format!(
            "{} initial amplitudes for {} blocks",
            b0.len(),
            flow.n_blocks()
        )));
    }
    if wz.u.len() != flow.n_blocks() || wz.u[0].len() != flow.len() {
        return Err(DaptError::Shape("transport does not match the flow".into()));
    }
    Ok(())
}

fn gap_checked(flow: &SpectralFlow, n: usize, m: usize, i: usize) -> Result<f64> {
    let gap = flow.gap(n, m, i);
    if gap.abs() < flow.deg_tol {
        return Err(DaptError::GapClosure {
            s: flow.s(i),
            m,
            n,
            gap: gap.abs(),
        });
    }
    Ok(gap)
}

/// `B^{(0)}_{mn}(s) = b_n U^n(s) delta_{mn}`.
pub fn zeroth_order(
    flow: &SpectralFlow,
    wz: &WzTransport,
    b0: &[C64],
    p_max: usize,
) -> Result<CoeffSet> {
    check_inputs(flow, wz, b0)?;
    if p_max > MAX_ORDER_CAP {
        return Err(DaptError::OrderExceeded {
            requested: p_max,
            max: MAX_ORDER_CAP,
        });
    }
    let nb = flow.n_blocks();
    let blocks = (0..nb)
        .map(|m| {
            (0..nb)
                .map(|n| {
                    (0..flow.len())
                        .map(|i| {
                            if m == n {
                                pad_rows(&wz.get(n, i).scale(b0[n]), flow.d_max)
                            } else {
                                CMatrix::zeros(flow.d_max, flow.d_list[n])
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CoeffSet {
        levels: vec![Level { blocks }],
        p_max,
        b0: b0.to_vec(),
        u0: wz.u0.clone(),
        omega: wz.omega.clone(),
        v: flow.v,
        d_max: flow.d_max,
    })
}

/// Running integral `J^{nmn}(s) = int_0^s U^n M^{nm} M^{mn} U^{n dagger} / Delta_{nm}`.
pub fn j_integral(
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
    n: usize,
    m: usize,
) -> Result<Vec<CMatrix>> {
    let integrand = (0..flow.len())
        .map(|i| {
            let gap = gap_checked(flow, n, m, i)?;
            let u = wz.get(n, i);
            Ok(u.matmul(mfield.get(n, m, i))
                .matmul(mfield.get(m, n, i))
                .matmul(&u.adjoint())
                .scale_re(1.0 / gap))
        })
        .collect::<Result<Vec<_>>>()?;
    cumulative_trapezoid(&integrand, flow.step())
}

/// Closed-form first order, appended to a set holding only the zeroth order.
pub fn first_order(
    coeffs: &mut CoeffSet,
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
) -> Result<()> {
    if coeffs.order() != 0 {
        return Err(DaptError::InvalidArgument(format!(
            "first order needs exactly level 0, have up to {}",
            coeffs.order()
        )));
    }
    if coeffs.p_max < 1 {
        return Err(DaptError::OrderExceeded {
            requested: 1,
            max: coeffs.p_max,
        });
    }
    let nb = flow.n_blocks();
    let hbar = flow.hbar;
    let b0 = coeffs.b0.clone();
    let ih = I * hbar;

    let mut blocks: Vec<Vec<Vec<CMatrix>>> = vec![vec![Vec::new(); nb]; nb];
    for m in 0..nb {
        for n in 0..nb {
            if m == n {
                continue;
            }
            blocks[m][n] = (0..flow.len())
                .map(|i| {
                    let gap = gap_checked(flow, n, m, i)?;
                    Ok(pad_rows(
                        &wz.get(m, i)
                            .matmul(mfield.get(m, n, i))
                            .scale(ih * b0[m] / gap),
                        flow.d_max,
                    ))
                })
                .collect::<Result<_>>()?;
        }
    }
    for n in 0..nb {
        let dn = flow.d_list[n];
        let un0_dag = wz.get(n, 0).adjoint();
        let mut initial = CMatrix::zeros(flow.d_max, dn);
        let mut j_sum: Vec<CMatrix> = vec![CMatrix::zeros(dn, dn); flow.len()];
        for m in 0..nb {
            if m == n {
                continue;
            }
            let gap0 = gap_checked(flow, n, m, 0)?;
            let t = wz
                .get(m, 0)
                .matmul(mfield.get(m, n, 0))
                .matmul(&un0_dag)
                .scale(-ih * b0[m] / gap0);
            initial += &pad_rows(&t, flow.d_max);
            if b0[n] != ZERO {
                for (acc, j) in j_sum.iter_mut().zip(j_integral(flow, mfield, wz, n, m)?) {
                    *acc += &j;
                }
            }
        }
        blocks[n][n] = (0..flow.len())
            .map(|i| {
                let u = wz.get(n, i);
                &initial.matmul(u) + &pad_rows(&j_sum[i].matmul(u).scale(ih * b0[n]), flow.d_max)
            })
            .collect();
    }
    push_checked(coeffs, Level { blocks })
}

/// Zero-pads `a` below to `rows` rows.
fn pad_rows(a: &CMatrix, rows: usize) -> CMatrix {
    a.padded(rows, a.cols())
}

fn push_checked(coeffs: &mut CoeffSet, level: Level) -> Result<()> {
    let order = coeffs.levels.len();
    let residual = level.sum_rule_residual();
    let scale = level
        .blocks
        .iter()
        .flatten()
        .map(|series| series[0].max_abs())
        .fold(1.0, f64::max);
    if residual > SUM_RULE_TOL * scale {
        return Err(DaptError::SumRule { order, residual });
    }
    coeffs.levels.push(level);
    Ok(())
}

/// Generic step from the highest stored order `p` to `p + 1`.
pub fn recurse_order(
    coeffs: &mut CoeffSet,
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
) -> Result<()> {
    let p = coeffs.order();
    if p + 1 > coeffs.p_max {
        return Err(DaptError::OrderExceeded {
            requested: p + 1,
            max: coeffs.p_max,
        });
    }
    let nb = flow.n_blocks();
    let hbar = flow.hbar;
    let h = flow.step();
    let prev = &coeffs.levels[p];

    let pairs: Vec<(usize, usize)> = (0..nb)
        .flat_map(|m| (0..nb).map(move |n| (m, n)))
        .filter(|(m, n)| m != n)
        .collect();
    let off: Vec<((usize, usize), Vec<CMatrix>)> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let bdot = grid_derivative(&prev.blocks[m][n], h)?;
            let series = (0..flow.len())
                .map(|i| {
                    let gap = gap_checked(flow, n, m, i)?;
                    let mut acc = bdot[i].clone();
                    for k in 0..nb {
                        acc += &prev.get(m, k, i).matmul(mfield.get(k, n, i));
                    }
                    Ok(acc.scale(I * hbar / gap))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(((m, n), series))
        })
        .collect::<Result<_>>()?;

    let mut blocks: Vec<Vec<Vec<CMatrix>>> = vec![vec![Vec::new(); nb]; nb];
    for ((m, n), series) in off {
        blocks[m][n] = series;
    }

    // Diagonal blocks: d/ds (B_nn U^n dagger) = -sum_{k != n} B_nk M^{kn} U^n dagger,
    // started from the sum rule B_nn(0) = -sum_{m != n} B_mn(0).
    let diag: Vec<Vec<CMatrix>> = (0..nb)
        .into_par_iter()
        .map(|n| {
            let dn = flow.d_list[n];
            let mut start = CMatrix::zeros(flow.d_max, dn);
            for m in 0..nb {
                if m != n {
                    start -= &blocks[m][n][0];
                }
            }
            let integrand: Vec<CMatrix> = (0..flow.len())
                .map(|i| {
                    let mut acc = CMatrix::zeros(flow.d_max, dn);
                    for k in 0..nb {
                        if k != n {
                            acc += &blocks[n][k][i].matmul(mfield.get(k, n, i));
                        }
                    }
                    acc.matmul(&wz.get(n, i).adjoint())
                })
                .collect();
            let running = cumulative_trapezoid(&integrand, h)?;
            let base = start.matmul(&wz.get(n, 0).adjoint());
            Ok((0..flow.len())
                .map(|i| (&base - &running[i]).matmul(wz.get(n, i)))
                .collect())
        })
        .collect::<Result<_>>()?;
    for (n, series) in diag.into_iter().enumerate() {
        blocks[n][n] = series;
    }
    push_checked(coeffs, Level { blocks })
}

/// Zeroth order, closed-form first order, then the generic recursion up to `p_max`.
pub fn compute(
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
    b0: &[C64],
    p_max: usize,
) -> Result<CoeffSet> {
    let mut coeffs = zeroth_order(flow, wz, b0, p_max)?;
    if p_max >= 1 {
        first_order(&mut coeffs, flow, mfield, wz)?;
    }
    while coeffs.order() < p_max {
        recurse_order(&mut coeffs, flow, mfield, wz)?;
    }
    Ok(coeffs)
}

/// Snapshot amplitudes of `|Psi^{(p)}(s_i)>` for initial row `h`.
pub fn order_amplitudes(
    coeffs: &CoeffSet,
    flow: &SpectralFlow,
    p: usize,
    h: usize,
    i: usize,
) -> CVector {
    let nb = flow.n_blocks();
    let phases: Vec<C64> = (0..nb)
        .map(|m| (-I * (coeffs.omega[m][i] / coeffs.v)).exp())
        .collect();
    let mut out = Vec::with_capacity(flow.dim);
    for n in 0..nb {
        for g in 0..flow.d_list[n] {
            let mut c = ZERO;
            for m in 0..nb {
                c += phases[m] * coeffs.get(p, m, n, i)[(h, g)];
            }
            out.push(c);
        }
    }
    CVector::from_vec(out)
}

/// Per-order states and the normalized truncated sum for every grid point.
#[derive(Clone, Debug)]
pub struct Assembled {
    /// `per_order[p][i]`, unnormalized, without the `v^p` factor.
    pub per_order: Vec<Vec<QuantumState>>,
    /// `sum_{p <= k} v^p Psi^{(p)}` normalized at each point.
    pub truncated: Vec<QuantumState>,
}

pub fn assemble_state(
    coeffs: &CoeffSet,
    flow: &SpectralFlow,
    k: usize,
    h: usize,
) -> Result<Assembled> {
    if k > coeffs.order() {
        return Err(DaptError::OrderExceeded {
            requested: k,
            max: coeffs.order(),
        });
    }
    if h >= flow.d_max {
        return Err(DaptError::InvalidArgument(format!(
            "initial row {h} outside d_max = {}",
            flow.d_max
        )));
    }
    let per_order: Vec<Vec<QuantumState>> = (0..=k)
        .map(|p| {
            (0..flow.len())
                .into_par_iter()
                .map(|i| QuantumState {
                    basis: Basis::Snapshot,
                    s: flow.s(i),
                    amplitudes: order_amplitudes(coeffs, flow, p, h, i),
                })
                .collect()
        })
        .collect();
    let truncated = (0..flow.len())
        .map(|i| {
            let mut acc = CVector::zeros(flow.dim);
            let mut vp = 1.0;
            for level in &per_order {
                acc.axpy(C64::from(vp), &level[i].amplitudes);
                vp *= coeffs.v;
            }
            QuantumState {
                basis: Basis::Snapshot,
                s: flow.s(i),
                amplitudes: acc.normalized(),
            }
        })
        .collect();
    Ok(Assembled {
        per_order,
        truncated,
    })
}

/// Runs the pipeline at `n_steps` and `n_steps / 2` and returns the largest
/// change of the order-`k` truncated state on the shared grid points.
pub fn refinement_check(
    path: &dyn HamiltonianPath,
    n_steps: usize,
    deg_tol: f64,
    k: usize,
) -> Result<f64> {
    if !n_steps.is_multiple_of(2) {
        return Err(DaptError::InvalidArgument(format!(
            "n_steps = {n_steps} must be even"
        )));
    }
    let run = |n: usize| -> Result<(SpectralFlow, Assembled)> {
        let flow = crate::spectrum::build_flow(path, n, deg_tol)?;
        let mf = crate::spectrum::m_field(&flow, path)?;
        let wz = crate::phases::wz_transport(&flow, &mf, &crate::phases::identity_u0(&flow))?;
        let coeffs = compute(&flow, &mf, &wz, &ground_start(&flow), k)?;
        let a = assemble_state(&coeffs, &flow, k, 0)?;
        Ok((flow, a))
    };
    let (fine_flow, fine) = run(n_steps)?;
    let (coarse_flow, coarse) = run(n_steps / 2)?;
    let mut worst: f64 = 0.0;
    for (j, c) in coarse.truncated.iter().enumerate() {
        // The two flows may use different gauges; the lab-frame state does not.
        let f = fine.truncated[2 * j].to_lab(&fine_flow, 2 * j);
        let c = c.to_lab(&coarse_flow, j);
        worst = worst.max((&f.amplitudes - &c.amplitudes).norm());
    }
    Ok(worst)
}
