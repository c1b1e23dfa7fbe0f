// SPDX-License-Identifier: Apache-2.0

//! Spectral flow of a Hamiltonian path and the coupling matrices between eigenspaces.
//!
//! Index convention for the coupling field: `M^{mn}` is a `d_m x d_n` matrix with
//! `[M^{mn}]_{g,h} = <n^h | d/ds m^g>`. It is anti-Hermitian in the block sense,
//! `(M^{nm})^dagger = -M^{mn}`.

use rayon::prelude::*;

use crate::error::{DaptError, Result};
use crate::linalg::{eigh, grid_derivative, nearest_unitary, CMatrix, UniformGrid};

/// A Hermitian matrix-valued function of rescaled time `s in [0, 1]`.
pub trait HamiltonianPath: Sync {
    /// Hilbert-space dimension.
    fn dim(&self) -> usize;

    fn hamiltonian(&self, s: f64) -> CMatrix;

    /// `dH/ds`, if known in closed form.
    fn derivative(&self, _s: f64) -> Option<CMatrix> {
        None
    }

    /// Closed-form eigenspaces `(energy, orthonormal columns)` in ascending energy.
    /// When provided, it is used as-is and no gauge alignment is applied.
    fn analytic_basis(&self, _s: f64) -> Option<Vec<(f64, CMatrix)>> {
        None
    }

    /// Adiabatic parameter `1/T`.
    fn v(&self) -> f64;

    fn hbar(&self) -> f64;
}

/// One eigenspace at one grid point.
#[derive(Clone, Debug)]
pub struct Block {
    pub energy: f64,
    pub basis: CMatrix,
}

#[derive(Clone, Debug)]
pub struct SpectralFlow {
    pub grid: UniformGrid,
    /// `points[i][n]`: block `n` at grid point `i`.
    pub points: Vec<Vec<Block>>,
    pub d_list: Vec<usize>,
    pub d_max: usize,
    pub dim: usize,
    pub v: f64,
    pub hbar: f64,
    pub deg_tol: f64,
    pub analytic: bool,
}

impl SpectralFlow {
    pub fn n_blocks(&self) -> usize {
        self.d_list.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn s(&self, i: usize) -> f64 {
        self.grid.point(i)
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    pub fn energy(&self, n: usize, i: usize) -> f64 {
        self.points[i][n].energy
    }

    pub fn basis(&self, n: usize, i: usize) -> &CMatrix {
        &self.points[i][n].basis
    }

    /// `Delta_{nm} = E_n - E_m`.
    pub fn gap(&self, n: usize, m: usize, i: usize) -> f64 {
        self.energy(n, i) - self.energy(m, i)
    }

    /// Smallest distance between adjacent block energies at grid point `i`.
    pub fn min_gap(&self, i: usize) -> f64 {
        self.points[i]
            .windows(2)
            .map(|w| (w[1].energy - w[0].energy).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Block offsets into the concatenated snapshot-basis layout.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.d_list
            .iter()
            .map(|d| {
                let o = acc;
                acc += d;
                o
            })
            .collect()
    }

    /// All snapshot eigenvectors at grid point `i`, blocks concatenated in order.
    pub fn snapshot_matrix(&self, i: usize) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        let mut col = 0;
        for b in &self.points[i] {
            for g in 0..b.basis.cols() {
                out.set_column(col, &b.basis.column(g));
                col += 1;
            }
        }
        out
    }
}

/// Smallest overlap singular value below which consecutive bases count as a jump.
pub const GAUGE_MIN_OVERLAP: f64 = 0.9;
const ORTHO_TOL: f64 = 1e-10;

/// Samples `path` on `n_steps + 1` points, clusters degenerate eigenvalues and
/// gauge-aligns every block along the grid.
pub fn build_flow(
    path: &dyn HamiltonianPath,
    n_steps: usize,
    deg_tol: f64,
) -> Result<SpectralFlow> {
    if n_steps < 16 {
        return Err(DaptError::InvalidArgument(format!(
            "n_steps = {n_steps}, need at least 16"
        )));
    }
    if !(deg_tol > 0.0) {
        return Err(DaptError::InvalidArgument(format!(
            "deg_tol = {deg_tol}, must be positive"
        )));
    }
    let grid = UniformGrid::unit(n_steps)?;
    let analytic = path.analytic_basis(0.0).is_some();

    let mut points: Vec<Vec<Block>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let s = grid.point(i);
            if analytic {
                let blocks = path.analytic_basis(s).ok_or_else(|| {
                    DaptError::InvalidArgument(format!("analytic basis missing at s = {s}"))
                })?;
                Ok(blocks
                    .into_iter()
                    .map(|(energy, basis)| Block { energy, basis })
                    .collect())
            } else {
                cluster(&path.hamiltonian(s), s, deg_tol)
            }
        })
        .collect::<Result<_>>()?;

    let d_list: Vec<usize> = points[0].iter().map(|b| b.basis.cols()).collect();
    for (i, pt) in points.iter().enumerate() {
        let d: Vec<usize> = pt.iter().map(|b| b.basis.cols()).collect();
        if d != d_list {
            return Err(DaptError::StructureChanged {
                s: grid.point(i),
                detail: format!("degeneracies {d:?}, expected {d_list:?}"),
            });
        }
    }

    if analytic {
        points
            .par_iter()
            .enumerate()
            .try_for_each(|(i, pt)| check_orthogonal(pt, grid.point(i)))?;
    } else {
        for i in 1..points.len() {
            for n in 0..d_list.len() {
                let aligned = gauge_align(&points[i - 1][n].basis, &points[i][n].basis)?;
                points[i][n].basis = aligned;
            }
        }
    }
    for i in 1..points.len() {
        for n in 0..d_list.len() {
            let sigma = min_overlap_singular_value(&points[i - 1][n].basis, &points[i][n].basis)?;
            if sigma < GAUGE_MIN_OVERLAP {
                return Err(DaptError::GaugeJump {
                    s: grid.point(i),
                    block: n,
                    sigma_min: sigma,
                });
            }
        }
    }

    Ok(SpectralFlow {
        grid,
        d_max: d_list.iter().copied().max().unwrap_or(0),
        d_list,
        points,
        dim: path.dim(),
        v: path.v(),
        hbar: path.hbar(),
        deg_tol,
        analytic,
    })
}

/// Groups ascending eigenvalues into clusters closer than `deg_tol`.
fn cluster(h: &CMatrix, s: f64, deg_tol: f64) -> Result<Vec<Block>> {
    let e = eigh(h)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (j, &lam) in e.values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if lam - e.values[g[g.len() - 1]] < deg_tol => {
                if lam - e.values[g[0]] >= deg_tol {
                    return Err(DaptError::ClusterAmbiguity {
                        s,
                        detail: format!(
                            "eigenvalue {lam} chains clusters wider than deg_tol = {deg_tol}"
                        ),
                    });
                }
                g.push(j);
            }
            _ => groups.push(vec![j]),
        }
    }
    Ok(groups
        .into_iter()
        .map(|g| {
            let energy = g.iter().map(|&j| e.values[j]).sum::<f64>() / g.len() as f64;
            let basis = CMatrix::from_fn(h.rows(), g.len(), |r, c| e.vectors[(r, g[c])]);
            Block { energy, basis }
        })
        .collect())
}

fn check_orthogonal(blocks: &[Block], s: f64) -> Result<()> {
    for (m, bm) in blocks.iter().enumerate() {
        for (n, bn) in blocks.iter().enumerate().skip(m) {
            let gram = bm.basis.adjoint().matmul(&bn.basis);
            let target = if m == n {
                CMatrix::identity(gram.rows())
            } else {
                CMatrix::zeros(gram.rows(), gram.cols())
            };
            let err = (&gram - &target).max_abs();
            if err > ORTHO_TOL {
                return Err(DaptError::InvalidArgument(format!(
                    "analytic basis not orthonormal at s = {s} (blocks {m}, {n}, error {err:.3e})"
                )));
            }
        }
    }
    Ok(())
}

fn min_overlap_singular_value(prev: &CMatrix, cur: &CMatrix) -> Result<f64> {
    let o = cur.adjoint().matmul(prev);
    let e = eigh(&o.adjoint().matmul(&o))?;
    Ok(e.values[0].max(0.0).sqrt())
}

/// Rotates `cur` within its span to be as close as possible to `prev`.
pub fn gauge_align(prev: &CMatrix, cur: &CMatrix) -> Result<CMatrix> {
    if prev.rows() != cur.rows() || prev.cols() != cur.cols() {
        return Err(DaptError::Shape(format!(
            "bases {}x{} and {}x{}",
            prev.rows(),
            prev.cols(),
            cur.rows(),
            cur.cols()
        )));
    }
    let w = nearest_unitary(&cur.adjoint().matmul(prev)).map_err(|e| match e {
        DaptError::Singular { sigma_min } => DaptError::GaugeJump {
            s: f64::NAN,
            block: usize::MAX,
            sigma_min,
        },
        other => other,
    })?;
    Ok(cur.matmul(&w))
}

/// Coupling matrices `M^{mn}(s)` on the flow grid, in units of `1/s`.
#[derive(Clone, Debug)]
pub struct MField {
    /// `blocks[m][n][i]`, shape `d_m x d_n`.
    pub blocks: Vec<Vec<Vec<CMatrix>>>,
    pub d_max: usize,
}

impl MField {
    pub fn get(&self, m: usize, n: usize, i: usize) -> &CMatrix {
        &self.blocks[m][n][i]
    }

    /// `M^{mn}(s_i)` zero-padded to `d_max x d_max`.
    pub fn padded(&self, m: usize, n: usize, i: usize) -> CMatrix {
        self.blocks[m][n][i].padded(self.d_max, self.d_max)
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn len(&self) -> usize {
        self.blocks.first().map_or(0, |r| r[0].len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest `|(M^{nm})^dagger + M^{mn}|` entry over the grid.
    pub fn antisymmetry_defect(&self) -> f64 {
        let nb = self.n_blocks();
        let mut worst: f64 = 0.0;
        for m in 0..nb {
            for n in m..nb {
                for i in 0..self.len() {
                    let d = &self.blocks[n][m][i].adjoint() + &self.blocks[m][n][i];
                    worst = worst.max(d.max_abs());
                }
            }
        }
        worst
    }
}

/// Off-diagonal blocks from `<n|dH/ds|m> / (E_m - E_n)`; diagonal blocks by
/// second-order finite differences of the aligned basis.
pub fn m_field(flow: &SpectralFlow, path: &dyn HamiltonianPath) -> Result<MField> {
    let nb = flow.n_blocks();
    let len = flow.len();
    let h = flow.step();

    let hdot: Vec<CMatrix> = (0..len)
        .into_par_iter()
        .map(|i| {
            path.derivative(flow.s(i))
                .unwrap_or_else(|| synthesized_derivative(path, flow, i))
        })
        .collect();

    let basis_dot: Vec<Vec<CMatrix>> = (0..nb)
        .map(|n| {
            let series: Vec<CMatrix> = (0..len).map(|i| flow.basis(n, i).clone()).collect();
            grid_derivative(&series, h)
        })
        .collect::<Result<_>>()?;

    let per_point: Vec<Vec<Vec<CMatrix>>> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(nb);
            for m in 0..nb {
                let mut col = Vec::with_capacity(nb);
                for n in 0..nb {
                    let vm = flow.basis(m, i);
                    let vn = flow.basis(n, i);
                    if m == n {
                        col.push(vn.adjoint().matmul(&basis_dot[n][i]).transpose());
                    } else {
                        let gap = flow.energy(m, i) - flow.energy(n, i);
                        if gap.abs() < flow.deg_tol {
                            return Err(DaptError::GapClosure {
                                s: flow.s(i),
                                m,
                                n,
                                gap: gap.abs(),
                            });
                        }
                        let proj = vn.adjoint().matmul(&hdot[i]).matmul(vm);
                        col.push(proj.transpose().scale_re(1.0 / gap));
                    }
                }
                row.push(col);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut blocks: Vec<Vec<Vec<CMatrix>>> = (0..nb)
        .map(|_| (0..nb).map(|_| Vec::with_capacity(len)).collect())
        .collect();
    for pt in per_point {
        for (m, row) in pt.into_iter().enumerate() {
            for (n, mat) in row.into_iter().enumerate() {
                blocks[m][n].push(mat);
            }
        }
    }
    Ok(MField {
        blocks,
        d_max: flow.d_max,
    })
}

/// Second-order difference of `H` with the grid step; one-sided at the ends.
fn synthesized_derivative(path: &dyn HamiltonianPath, flow: &SpectralFlow, i: usize) -> CMatrix {
    let h = flow.step();
    let s = flow.s(i);
    let last = flow.len() - 1;
    if i == 0 {
        let d = &(&path.hamiltonian(s + h).scale_re(4.0) - &path.hamiltonian(s).scale_re(3.0))
            - &path.hamiltonian(s + 2.0 * h);
        d.scale_re(0.5 / h)
    } else if i == last {
        let d = &(&path.hamiltonian(s).scale_re(3.0) - &path.hamiltonian(s - h).scale_re(4.0))
            + &path.hamiltonian(s - 2.0 * h);
        d.scale_re(0.5 / h)
    } else {
        (&path.hamiltonian(s + h) - &path.hamiltonian(s - h)).scale_re(0.5 / h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE, ZERO};

    struct Constant(CMatrix);

    impl HamiltonianPath for Constant {
        fn dim(&self) -> usize {
            self.0.rows()
        }
        fn hamiltonian(&self, _s: f64) -> CMatrix {
            self.0.clone()
        }
        fn v(&self) -> f64 {
            0.1
        }
        fn hbar(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn constant_path_blocks_and_zero_coupling() {
        let p = Constant(CMatrix::from_diag(&[ZERO, ZERO, ONE]));
        let flow = build_flow(&p, 32, 1e-8).unwrap();
        assert_eq!(flow.d_list, vec![2, 1]);
        assert_eq!(flow.d_max, 2);
        assert!(flow
            .points
            .iter()
            .all(|pt| pt[0].energy.abs() < 1e-15 && (pt[1].energy - 1.0).abs() < 1e-15));
        let mf = m_field(&flow, &p).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                for i in 0..flow.len() {
                    assert!(mf.get(m, n, i).max_abs() < 1e-12);
                }
            }
        }
        assert_eq!(mf.padded(1, 0, 0).rows(), 2);
    }

    #[test]
    fn rejects_short_grid_and_bad_tolerance() {
        let p = Constant(CMatrix::identity(2));
        assert!(build_flow(&p, 8, 1e-8).is_err());
        assert!(build_flow(&p, 32, 0.0).is_err());
    }

    #[test]
    fn ambiguous_cluster_is_an_error() {
        let d = [C64::from(0.0), C64::from(0.6e-8), C64::from(1.2e-8)];
        let p = Constant(CMatrix::from_diag(&d));
        assert!(matches!(
            build_flow(&p, 16, 1e-8),
            Err(DaptError::ClusterAmbiguity { .. })
        ));
    }

    struct Crossing;

    impl HamiltonianPath for Crossing {
        fn dim(&self) -> usize {
            2
        }
        fn hamiltonian(&self, s: f64) -> CMatrix {
            CMatrix::from_diag(&[C64::from(s - 0.5), C64::from(0.5 - s)])
        }
        fn v(&self) -> f64 {
            1.0
        }
        fn hbar(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn level_crossing_changes_structure() {
        assert!(matches!(
            build_flow(&Crossing, 16, 1e-8),
            Err(DaptError::StructureChanged { .. })
        ));
    }

    #[test]
    fn gauge_align_identity_and_phases() {
        let prev = CMatrix::identity(3).submatrix(0, 0, 3, 2);
        assert!((&gauge_align(&prev, &prev).unwrap() - &prev).max_abs() < 1e-14);
        let ph = CMatrix::from_diag(&[C64::from_polar(1.0, 0.7), C64::from_polar(1.0, -2.1)]);
        let cur = prev.matmul(&ph);
        assert!((&gauge_align(&prev, &cur).unwrap() - &prev).max_abs() < 1e-13);
    }

    #[test]
    fn gauge_align_rejects_orthogonal_spans() {
        let id = CMatrix::identity(2);
        let a = id.submatrix(0, 0, 2, 1);
        let b = id.submatrix(0, 1, 2, 1);
        assert!(gauge_align(&a, &b).is_err());
    }
}
