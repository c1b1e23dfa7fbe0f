// SPDX-License-Identifier: Apache-2.0

//! Necessary and sufficient adiabaticity conditions, evaluated in real time `t = s / v`
//! for a system that starts in block 0, plus the ratio-test convergence diagnostic.
//!
//! "Much smaller than" is read as `lhs < margin * rhs`.

use rayon::prelude::*;

use crate::dapt::CoeffSet;
use crate::error::{DaptError, Result};
use crate::linalg::{cumulative_trapezoid, CMatrix};
use crate::phases::WzTransport;
use crate::spectrum::{MField, SpectralFlow};

pub const DEFAULT_MARGIN: f64 = 0.1;
pub const DEFAULT_NULL_TOL: f64 = 1e-6;

/// Smallest entry of `row` that is not below `null_tol`.
pub fn min_plus(row: &[f64], null_tol: f64) -> Result<f64> {
    row.iter()
        .copied()
        .filter(|&x| x >= null_tol)
        .min_by(f64::total_cmp)
        .ok_or_else(|| {
            DaptError::InvalidArgument(format!("every entry of {row:?} is below {null_tol}"))
        })
}

/// `M^{0n}` converted to inverse real-time units.
fn m_t(flow: &SpectralFlow, mfield: &MField, n: usize, i: usize) -> CMatrix {
    mfield.get(0, n, i).scale_re(flow.v)
}

fn column_sums(a: &CMatrix) -> Vec<f64> {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|r| a[(r, j)].norm()).sum())
        .collect()
}

/// `hbar |[M^{0n}]_{., g_n}|_1 / |Delta_{n0}|`, maximized over columns, for every
/// excited block; indexed `[n - 1][i]`.
pub fn necessary_strong(flow: &SpectralFlow, mfield: &MField) -> Vec<Vec<f64>> {
    (1..flow.n_blocks())
        .map(|n| {
            (0..flow.len())
                .map(|i| {
                    let gap = flow.gap(n, 0, i).abs();
                    let sums = column_sums(&m_t(flow, mfield, n, i));
                    flow.hbar * sums.into_iter().fold(0.0, f64::max) / gap
                })
                .collect()
        })
        .collect()
}

/// `hbar max_{h_0, g_n} |(U^0 M^{0n})_{h_0 g_n}| / |Delta_{n0}|`; indexed `[n - 1][i]`.
pub fn necessary_weak(flow: &SpectralFlow, mfield: &MField, wz: &WzTransport) -> Vec<Vec<f64>> {
    (1..flow.n_blocks())
        .map(|n| {
            (0..flow.len())
                .map(|i| {
                    let gap = flow.gap(n, 0, i).abs();
                    flow.hbar * wz.get(0, i).matmul(&m_t(flow, mfield, n, i)).max_abs() / gap
                })
                .collect()
        })
        .collect()
}

/// Left-hand sides of the two practical sufficient conditions and their common
/// right-hand side.
#[derive(Clone, Debug)]
pub struct Sufficient {
    pub suf_a_lhs: Vec<f64>,
    /// `[n - 1][g_n][i]`.
    pub suf_b_lhs: Vec<Vec<Vec<f64>>>,
    pub rhs: Vec<f64>,
}

pub fn sufficient_practical(
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
    null_tol: f64,
) -> Result<Sufficient> {
    let nb = flow.n_blocks();
    let d0 = flow.d_list[0] as f64;
    let hbar = flow.hbar;
    let dt = flow.step() / flow.v;

    let integrand: Vec<f64> = (0..flow.len())
        .map(|i| {
            (1..nb)
                .map(|n| {
                    let m = m_t(flow, mfield, n, i);
                    m.matmul(&m.adjoint()).abs_sum() / flow.gap(0, n, i).abs()
                })
                .sum::<f64>()
        })
        .collect();
    let suf_a_lhs = cumulative_trapezoid(&integrand, dt)?
        .into_iter()
        .map(|x| hbar * d0 * x)
        .collect();

    let suf_b_lhs = (1..nb)
        .map(|n| {
            let m0 = m_t(flow, mfield, n, 0);
            let dn = flow.d_list[n] as f64;
            let pref = hbar / flow.gap(n, 0, 0).abs();
            let tail = dn * m0.abs_sum();
            let per_point: Vec<Vec<f64>> = (0..flow.len())
                .map(|i| {
                    column_sums(&m_t(flow, mfield, n, i))
                        .into_iter()
                        .map(|c| pref * (c + tail))
                        .collect()
                })
                .collect();
            (0..flow.d_list[n])
                .map(|g| per_point.iter().map(|row| row[g]).collect())
                .collect()
        })
        .collect();

    let rhs = (0..flow.len())
        .map(|i| {
            let u = wz.get(0, i);
            let row: Vec<f64> = (0..u.cols()).map(|g| u[(0, g)].norm()).collect();
            min_plus(&row, null_tol)
        })
        .collect::<Result<_>>()?;

    Ok(Sufficient {
        suf_a_lhs,
        suf_b_lhs,
        rhs,
    })
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub t: Vec<f64>,
    /// Maximum over excited blocks of the strong necessary quantity.
    pub nec_strong: Vec<f64>,
    pub nec_weak: Vec<f64>,
    pub suf_a_lhs: Vec<f64>,
    pub suf_a_rhs: Vec<f64>,
    /// `[n - 1][g_n][i]`.
    pub suf_b_lhs: Vec<Vec<Vec<f64>>>,
    pub suf_b_lhs_max: Vec<f64>,
    pub suf_b_rhs: Vec<f64>,
    pub margin: f64,
    pub null_tol: f64,
}

impl ConditionReport {
    pub fn necessary_passed(&self) -> bool {
        self.nec_strong.iter().all(|&x| x < self.margin)
    }

    pub fn suf_a_passed(&self) -> bool {
        self.suf_a_lhs
            .iter()
            .zip(&self.suf_a_rhs)
            .all(|(l, r)| *l < self.margin * r)
    }

    pub fn suf_b_passed(&self) -> bool {
        self.suf_b_lhs_max
            .iter()
            .zip(&self.suf_b_rhs)
            .all(|(l, r)| *l < self.margin * r)
    }

    pub fn sufficient_passed(&self) -> bool {
        self.suf_a_passed() && self.suf_b_passed()
    }
}

fn pointwise_max(series: &[Vec<f64>], len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| series.iter().map(|s| s[i]).fold(0.0, f64::max))
        .collect()
}

/// Evaluates both condition families on the whole grid.
pub fn evaluate(
    flow: &SpectralFlow,
    mfield: &MField,
    wz: &WzTransport,
    margin: f64,
    null_tol: f64,
) -> Result<ConditionReport> {
    if !(margin > 0.0) || !(null_tol > 0.0) {
        return Err(DaptError::InvalidArgument(format!(
            "margin = {margin}, null_tol = {null_tol} must be positive"
        )));
    }
    let len = flow.len();
    let strong = necessary_strong(flow, mfield);
    let weak = necessary_weak(flow, mfield, wz);
    let suf = sufficient_practical(flow, mfield, wz, null_tol)?;
    let flat_b: Vec<Vec<f64>> = suf.suf_b_lhs.iter().flatten().cloned().collect();
    Ok(ConditionReport {
        t: (0..len).map(|i| flow.s(i) / flow.v).collect(),
        nec_strong: pointwise_max(&strong, len),
        nec_weak: pointwise_max(&weak, len),
        suf_a_lhs: suf.suf_a_lhs,
        suf_a_rhs: suf.rhs.clone(),
        suf_b_lhs_max: pointwise_max(&flat_b, len),
        suf_b_lhs: suf.suf_b_lhs,
        suf_b_rhs: suf.rhs,
        margin,
        null_tol,
    })
}

/// Ratio-test values `v sum_m |B^{(p+1)}_{mn}[0, g]| / sum_m |B^{(p)}_{mn}[0, g]|`,
/// indexed `[p][n][g][i]`; `None` where the denominator vanishes.
pub fn ratio_diagnostic(coeffs: &CoeffSet) -> Vec<Vec<Vec<Vec<Option<f64>>>>> {
    let nb = coeffs.levels[0].blocks.len();
    let len = coeffs.levels[0].blocks[0][0].len();
    let column = |p: usize, n: usize, g: usize, i: usize| -> f64 {
        (0..nb).map(|m| coeffs.get(p, m, n, i)[(0, g)].norm()).sum()
    };
    (0..coeffs.order())
        .map(|p| {
            (0..nb)
                .map(|n| {
                    let dn = coeffs.get(0, n, n, 0).cols();
                    (0..dn)
                        .map(|g| {
                            (0..len)
                                .into_par_iter()
                                .map(|i| {
                                    let den = column(p, n, g, i);
                                    if den == 0.0 {
                                        None
                                    } else {
                                        Some(coeffs.v * column(p + 1, n, g, i) / den)
                                    }
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Largest applicable ratio at order `p`, over all blocks, columns and grid points.
pub fn max_ratio(ratios: &[Vec<Vec<Vec<Option<f64>>>>], p: usize) -> Option<f64> {
    ratios[p]
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .copied()
        .reduce(f64::max)
}
