// SPDX-License-Identifier: Apache-2.0

//! Four-level system in a rotating field, `H(t) = (hbar b / 2) r(t) . Gamma`.
//!
//! `Gamma_j = sigma_x (x) sigma_j`, `Pi_z = 1 (x) sigma_z`, and the field direction
//! `r(t) = (sin theta cos wt, sin theta sin wt, cos theta)`. The lab basis is
//! ordered `|uu>, |ud>, |du>, |dd>`. The spectrum is `-hbar b / 2` and `+hbar b / 2`,
//! each doubly degenerate, so the gap never closes.
//!
//! Time `t` and rescaled time `s` are related by `s = v t`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{DaptError, Result};
use crate::linalg::{CMatrix, CVector, C64, I, ONE, ZERO};
use crate::spectrum::HamiltonianPath;
use crate::state::{Basis, QuantumState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourLevelModel {
    pub b: f64,
    pub w: f64,
    pub theta: f64,
    pub hbar: f64,
    pub v: f64,
}

fn c(re: f64) -> C64 {
    C64::from(re)
}

fn pauli() -> [CMatrix; 3] {
    [
        CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap(),
        CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap(),
        CMatrix::from_diag(&[ONE, -ONE]),
    ]
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a[(i / b.rows(), j / b.cols())] * b[(i % b.rows(), j % b.cols())]
    })
}

/// `Gamma_j = sigma_x (x) sigma_j` for `j = x, y, z`.
pub fn gammas() -> [CMatrix; 3] {
    let s = pauli();
    [kron(&s[0], &s[0]), kron(&s[0], &s[1]), kron(&s[0], &s[2])]
}

/// `Pi_k = 1 (x) sigma_k` for `k = x, y, z`.
pub fn pis() -> [CMatrix; 3] {
    let s = pauli();
    let id = CMatrix::identity(2);
    [kron(&id, &s[0]), kron(&id, &s[1]), kron(&id, &s[2])]
}

/// `sin(omega t / 2) / omega`, continuous at `omega = 0`.
fn sin_half_over(omega: f64, t: f64) -> f64 {
    if omega.abs() < 1e-8 {
        t / 2.0
    } else {
        (omega * t / 2.0).sin() / omega
    }
}

impl FourLevelModel {
    pub fn new(b: f64, w: f64, theta: f64, hbar: f64, v: f64) -> Result<Self> {
        for (name, x) in [("b", b), ("hbar", hbar), ("v", v)] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(DaptError::InvalidArgument(format!(
                    "{name} = {x} must be positive"
                )));
            }
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(DaptError::InvalidArgument(format!(
                "w = {w} must be non-negative"
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(DaptError::InvalidArgument(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        Ok(Self {
            b,
            w,
            theta,
            hbar,
            v,
        })
    }

    /// `Omega_pm = sqrt(w^2 + b^2 pm 2 w b cos theta)`.
    pub fn omega_pm(&self) -> (f64, f64) {
        let base = self.w * self.w + self.b * self.b;
        let cross = 2.0 * self.w * self.b * self.theta.cos();
        (
            (base + cross).max(0.0).sqrt(),
            (base - cross).max(0.0).sqrt(),
        )
    }

    pub fn hamiltonian_t(&self, t: f64) -> CMatrix {
        let phi = self.w * t;
        let (st, ct) = self.theta.sin_cos();
        let r = [st * phi.cos(), st * phi.sin(), ct];
        let g = gammas();
        let mut h = CMatrix::zeros(4, 4);
        for (rj, gj) in r.iter().zip(&g) {
            h += &gj.scale_re(*rj);
        }
        h.scale_re(self.hbar * self.b / 2.0)
    }

    /// `dH/dt`.
    pub fn derivative_t(&self, t: f64) -> CMatrix {
        let phi = self.w * t;
        let st = self.theta.sin();
        let g = gammas();
        let d = &g[0].scale_re(-st * phi.sin() * self.w) + &g[1].scale_re(st * phi.cos() * self.w);
        d.scale_re(self.hbar * self.b / 2.0)
    }

    /// Snapshot eigenvectors `|0^0>, |0^1>, |1^0>, |1^1>` at time `t`.
    pub fn snapshot_basis(&self, t: f64) -> [CVector; 4] {
        let (st, ct) = self.theta.sin_cos();
        let em = (-I * (self.w * t)).exp() * st;
        let ep = (I * (self.w * t)).exp() * st;
        let k = FRAC_1_SQRT_2;
        let vec =
            |a: C64, b: C64, cc: C64, d: C64| CVector::from_vec(vec![a * k, b * k, cc * k, d * k]);
        [
            vec(em, c(-ct), ZERO, c(-1.0)),
            vec(c(ct), ep, c(-1.0), ZERO),
            vec(em, c(-ct), ZERO, c(1.0)),
            vec(c(ct), ep, c(1.0), ZERO),
        ]
    }

    /// Snapshot eigenvectors as the columns of a unitary matrix.
    pub fn snapshot_matrix(&self, t: f64) -> CMatrix {
        CMatrix::from_columns(&self.snapshot_basis(t)).expect("four columns of length four")
    }

    /// Block energies `(E_0, E_1) = (-hbar b / 2, +hbar b / 2)`.
    pub fn energies(&self) -> (f64, f64) {
        let e = self.hbar * self.b / 2.0;
        (-e, e)
    }

    /// Exact snapshot amplitudes at time `t` for the start `|0^0(0)>`.
    pub fn exact_amplitudes(&self, t: f64) -> CVector {
        let (b, w) = (self.b, self.w);
        let (st, ct) = self.theta.sin_cos();
        let (op, om) = self.omega_pm();
        let a = |omega: f64, sign: f64| {
            c((omega * t / 2.0).cos()) + I * ((b + sign * w * ct) * sin_half_over(omega, t))
        };
        let bb = |omega: f64| I * (w * sin_half_over(omega, t));
        let (ap, am, bp, bm) = (a(op, 1.0), a(om, -1.0), bb(op), bb(om));
        let rot_p = (I * (w * t / 2.0)).exp();
        let rot_m = rot_p.conj();
        CVector::from_vec(vec![
            rot_p * 0.5 * ((1.0 + ct) * am + (1.0 - ct) * ap),
            rot_m * (st / 2.0) * (ap - am),
            rot_p * (st * st / 2.0) * (bp + bm),
            rot_m * (st / 2.0) * ((1.0 + ct) * bm - (1.0 - ct) * bp),
        ])
    }

    /// Exact state at time `t` in the snapshot basis, tagged with `s = v t`.
    pub fn exact_state(&self, t: f64) -> QuantumState {
        QuantumState {
            basis: Basis::Snapshot,
            s: self.v * t,
            amplitudes: self.exact_amplitudes(t),
        }
    }

    /// Lab-frame exact state.
    pub fn exact_lab(&self, t: f64) -> CVector {
        self.snapshot_matrix(t).mul_vec(&self.exact_amplitudes(t))
    }

    /// Time-independent Hamiltonian of the co-rotating frame.
    pub fn rotating_frame_hamiltonian(&self) -> CMatrix {
        let (st, ct) = self.theta.sin_cos();
        let g = gammas();
        let p = pis();
        let h =
            &(&g[0].scale_re(self.b * st) + &g[2].scale_re(self.b * ct)) - &p[2].scale_re(self.w);
        h.scale_re(self.hbar / 2.0)
    }

    /// Eigenpairs `(E~_j, |E~_j>)` of the co-rotating Hamiltonian.
    pub fn rotating_frame_eigenpairs(&self) -> Result<[(f64, CVector); 4]> {
        let (b, w) = (self.b, self.w);
        let (st, ct) = self.theta.sin_cos();
        let (op, om) = self.omega_pm();
        let omm = (op - w - b * ct).max(0.0).sqrt();
        let opp = (op + w + b * ct).max(0.0).sqrt();
        let omp = (om - w + b * ct).max(0.0).sqrt();
        let opm = (om + w - b * ct).max(0.0).sqrt();
        let tiny = 1e-12;
        if [op, om, omm, opp, omp, opm].iter().any(|&x| x < tiny) {
            return Err(DaptError::InvalidArgument(
                "co-rotating spectrum is degenerate for these parameters".into(),
            ));
        }
        let mk = |x: f64, y: f64, z: f64, u: f64, norm: f64| {
            CVector::from_vec(vec![c(x * norm), c(y * norm), c(z * norm), c(u * norm)])
        };
        let bs = b * st;
        let hb = self.hbar / 2.0;
        Ok([
            (
                -hb * om,
                mk(
                    1.0,
                    -bs / (opm * opm),
                    1.0,
                    -bs / (opm * opm),
                    opm / (2.0 * om.sqrt()),
                ),
            ),
            (
                hb * om,
                mk(
                    1.0,
                    bs / (omp * omp),
                    1.0,
                    bs / (omp * omp),
                    omp / (2.0 * om.sqrt()),
                ),
            ),
            (
                -hb * op,
                mk(
                    1.0,
                    bs / (opp * opp),
                    -1.0,
                    -bs / (opp * opp),
                    opp / (2.0 * op.sqrt()),
                ),
            ),
            (
                hb * op,
                mk(
                    1.0,
                    -bs / (omm * omm),
                    -1.0,
                    bs / (omm * omm),
                    omm / (2.0 * op.sqrt()),
                ),
            ),
        ])
    }

    /// Expansion coefficients of `|0^0(0)>` on the co-rotating eigenvectors.
    pub fn rotating_frame_coefficients(&self) -> Result<[f64; 4]> {
        let (b, w) = (self.b, self.w);
        if self.theta <= 0.0 || self.theta >= std::f64::consts::PI {
            return Err(DaptError::InvalidArgument(
                "the co-rotating coefficients are singular at theta = 0 and theta = pi".into(),
            ));
        }
        let ct = self.theta.cos();
        let (op, om) = self.omega_pm();
        let omm = (op - w - b * ct).max(0.0).sqrt();
        let opp = (op + w + b * ct).max(0.0).sqrt();
        let omp = (om - w + b * ct).max(0.0).sqrt();
        let opm = (om + w - b * ct).max(0.0).sqrt();
        let tan_half = (self.theta / 2.0).tan();
        Ok([
            (om - w + b) * opm / (2.0 * b * (2.0 * om).sqrt()) / tan_half,
            -(om + w - b) * omp / (2.0 * b * (2.0 * om).sqrt()) / tan_half,
            (op - w + b) * opp / (2.0 * b * (2.0 * op).sqrt()) * tan_half,
            -(op + w - b) * omm / (2.0 * b * (2.0 * op).sqrt()) * tan_half,
        ])
    }

    /// Exact snapshot amplitudes built from the co-rotating eigen-expansion.
    /// Valid for `theta` strictly inside `(0, pi)` and a non-degenerate co-rotating spectrum.
    pub fn exact_amplitudes_eigen_route(&self, t: f64) -> Result<CVector> {
        let pairs = self.rotating_frame_eigenpairs()?;
        let coeffs = self.rotating_frame_coefficients()?;
        let mut rot = CVector::zeros(4);
        for ((e, vec), a) in pairs.iter().zip(coeffs) {
            rot.axpy((-I * (e * t / self.hbar)).exp() * a, vec);
        }
        // Back to the lab frame: exp(-i w t Pi_z / 2) is diagonal.
        let signs = [1.0, -1.0, 1.0, -1.0];
        let lab = CVector::from_vec(
            rot.iter()
                .zip(signs)
                .map(|(z, sg)| (-I * (sg * self.w * t / 2.0)).exp() * z)
                .collect(),
        );
        Ok(self.snapshot_matrix(t).adjoint().mul_vec(&lab))
    }

    /// Closed-form terms of the small-`v` expansion of the exact solution
    /// (order 0 and the coefficient of `v^1`), in the snapshot basis.
    pub fn expansion(&self, t: f64, order: usize) -> Result<CVector> {
        let (b, w, v) = (self.b, self.w, self.v);
        let (st, ct) = self.theta.sin_cos();
        let a = w * t / 2.0;
        let (ca, sa) = ((a * ct).cos(), (a * ct).sin());
        let eb = (I * (b * t / 2.0)).exp();
        let ep = (I * a).exp();
        let em = ep.conj();
        match order {
            0 => Ok(CVector::from_vec(vec![
                eb * ep * (c(ca) - I * (ct * sa)),
                I * eb * em * (st * sa),
                ZERO,
                ZERO,
            ])),
            1 => {
                let q = (-I * (b * t)).exp();
                let k = w / (2.0 * b * v);
                let kt = w * w * t / (4.0 * b * v);
                Ok(CVector::from_vec(vec![
                    I * eb * ep * (kt * st * st) * (c(ca) - I * (ct * sa)),
                    -eb * em * (kt * st * st * st * sa),
                    eb * ep * (k * st * st * ca) * (ONE - q),
                    eb * em * (k * st) * ((ONE - q) * (ct * ca) - I * (ONE + q) * sa),
                ]))
            }
            _ => Err(DaptError::OrderExceeded {
                requested: order,
                max: 1,
            }),
        }
    }

    /// Leading small-`theta` form of the `|1^1>` amplitude.
    pub fn small_theta_one_one(&self, t: f64) -> C64 {
        let (b, w) = (self.b, self.w);
        let d = w - b;
        let shape = if d.abs() < 1e-12 {
            t / 2.0
        } else {
            (d * t / 2.0).sin() / d
        };
        I * (self.theta * w) * (-I * (w * t / 2.0)).exp() * shape
    }
}

impl HamiltonianPath for FourLevelModel {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        self.hamiltonian_t(s / self.v)
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        Some(self.derivative_t(s / self.v).scale_re(1.0 / self.v))
    }

    fn analytic_basis(&self, s: f64) -> Option<Vec<(f64, CMatrix)>> {
        let [v00, v01, v10, v11] = self.snapshot_basis(s / self.v);
        let (e0, e1) = self.energies();
        Some(vec![
            (e0, CMatrix::from_columns(&[v00, v01]).ok()?),
            (e1, CMatrix::from_columns(&[v10, v11]).ok()?),
        ])
    }

    fn v(&self) -> f64 {
        self.v
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// The same model without the closed-form eigenvectors, so the spectral flow is
/// built by diagonalization and gauge alignment.
#[derive(Clone, Copy, Debug)]
pub struct NumericFourLevel(pub FourLevelModel);

impl HamiltonianPath for NumericFourLevel {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        self.0.hamiltonian(s)
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        self.0.derivative(s)
    }

    fn v(&self) -> f64 {
        self.0.v
    }

    fn hbar(&self) -> f64 {
        self.0.hbar
    }
}
