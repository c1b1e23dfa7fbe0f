// SPDX-License-Identifier: Apache-2.0

//! Reference quantities coded directly from closed forms, kept apart from the
//! library implementation they check.

#![allow(dead_code)]

use dapt_core::linalg::{CMatrix, CVector, C64, I, ZERO};
use dapt_core::spectrum::HamiltonianPath;

pub fn c(x: f64) -> C64 {
    C64::from(x)
}

/// Coupling block `M^{00}(s)` of the four-level model in s-units; `M^{11}` and
/// `M^{01}` coincide with it. Entry `[g, h] = <0^h | d/ds 0^g>`.
pub fn four_level_m(w: f64, theta: f64, v: f64, s: f64) -> CMatrix {
    let (st, ct) = theta.sin_cos();
    let k = w / (2.0 * v);
    let phi = w * s / v;
    let em = (-I * phi).exp();
    CMatrix::from_rows(&[
        vec![-I * (k * st * st), -I * (k * st * ct) * em],
        vec![-I * (k * st * ct) * em.conj(), I * (k * st * st)],
    ])
    .unwrap()
}

/// Wilczek-Zee unitary of either block of the four-level model.
pub fn four_level_wz(w: f64, theta: f64, v: f64, s: f64) -> CMatrix {
    let (st, ct) = theta.sin_cos();
    let a = w * s / (2.0 * v);
    let u00 = (I * a).exp() * (c((a * ct).cos()) - I * (ct * (a * ct).sin()));
    let u01 = I * (-I * a).exp() * (st * (a * ct).sin());
    CMatrix::from_rows(&[vec![u00, u01], vec![-u01.conj(), u00.conj()]]).unwrap()
}

/// Spin in a field of strength `e` whose direction has polar angle
/// `alpha0 + kappa s` and azimuth `omega s`: `H = e n . sigma`.
#[derive(Clone, Copy, Debug)]
pub struct TiltedSpin {
    pub e: f64,
    pub alpha0: f64,
    pub kappa: f64,
    pub omega: f64,
    pub v: f64,
}

impl TiltedSpin {
    fn angles(&self, s: f64) -> (f64, f64) {
        (self.alpha0 + self.kappa * s, self.omega * s)
    }

    /// Ground (`-e`) and excited (`+e`) eigenvectors.
    pub fn eigvecs(&self, s: f64) -> [CVector; 2] {
        let (a, phi) = self.angles(s);
        let (sa, ca) = (a / 2.0).sin_cos();
        let ep = (I * phi).exp();
        [
            CVector::from_vec(vec![-ep.conj() * sa, c(ca)]),
            CVector::from_vec(vec![c(ca), ep * sa]),
        ]
    }

    /// `d/ds` of [`Self::eigvecs`].
    pub fn eigvec_derivatives(&self, s: f64) -> [CVector; 2] {
        let (a, phi) = self.angles(s);
        let (sa, ca) = (a / 2.0).sin_cos();
        let ep = (I * phi).exp();
        let ha = self.kappa / 2.0;
        [
            CVector::from_vec(vec![
                ep.conj() * (I * (self.omega * sa) - c(ha * ca)),
                c(-ha * sa),
            ]),
            CVector::from_vec(vec![c(-ha * sa), ep * (c(ha * ca) + I * (self.omega * sa))]),
        ]
    }
}

impl HamiltonianPath for TiltedSpin {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        let (a, phi) = self.angles(s);
        let (sa, ca) = a.sin_cos();
        let off = (-I * phi).exp() * (self.e * sa);
        CMatrix::from_rows(&[vec![c(self.e * ca), off], vec![off.conj(), c(-self.e * ca)]]).unwrap()
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        let (a, phi) = self.angles(s);
        let (sa, ca) = a.sin_cos();
        let em = (-I * phi).exp();
        let off = em * (self.e * ca * self.kappa) - I * self.omega * em * (self.e * sa);
        let diag = -self.e * sa * self.kappa;
        Some(CMatrix::from_rows(&[vec![c(diag), off], vec![off.conj(), c(-diag)]]).unwrap())
    }

    fn v(&self) -> f64 {
        self.v
    }

    fn hbar(&self) -> f64 {
        1.0
    }
}

fn derivative(y: &[C64], h: f64) -> Vec<C64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] * 4.0 - y[2] - y[0] * 3.0) / (2.0 * h)
            } else if i == n - 1 {
                (y[n - 1] * 3.0 - y[n - 2] * 4.0 + y[n - 3]) / (2.0 * h)
            } else {
                (y[i + 1] - y[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

fn running_integral(y: &[C64], h: f64) -> Vec<C64> {
    let mut out = vec![ZERO; y.len()];
    for i in 1..y.len() {
        out[i] = out[i - 1] + (y[i] + y[i - 1]) * (0.5 * h);
    }
    out
}

/// Non-degenerate adiabatic perturbation theory for a two-level path, starting in
/// the ground state. Returns `psi[p][i]`: the order-`p` term in the lab basis on a
/// uniform grid of `n_steps` steps, without the `v^p` factor.
pub fn scalar_apt(path: &TiltedSpin, n_steps: usize, p_max: usize) -> Vec<Vec<CVector>> {
    let h = 1.0 / n_steps as f64;
    let s: Vec<f64> = (0..=n_steps).map(|i| i as f64 * h).collect();
    let energies = [-path.e, path.e];
    // mm[k][n][i] = <n | d/ds k>
    let mut mm = vec![vec![vec![ZERO; s.len()]; 2]; 2];
    for (i, &si) in s.iter().enumerate() {
        let vecs = path.eigvecs(si);
        let ders = path.eigvec_derivatives(si);
        for k in 0..2 {
            for n in 0..2 {
                mm[k][n][i] = vecs[n].dot(&ders[k]);
            }
        }
    }
    let gamma: Vec<Vec<C64>> = (0..2).map(|n| running_integral(&mm[n][n], h)).collect();

    // b[m][n][i]
    let mut b0 = vec![vec![vec![ZERO; s.len()]; 2]; 2];
    for i in 0..s.len() {
        b0[0][0][i] = (-gamma[0][i]).exp();
    }
    let mut levels = vec![b0];
    for _ in 0..p_max {
        let prev = levels.last().unwrap();
        let mut next = vec![vec![vec![ZERO; s.len()]; 2]; 2];
        for m in 0..2 {
            for n in 0..2 {
                if m == n {
                    continue;
                }
                let db = derivative(&prev[m][n], h);
                let gap = energies[n] - energies[m];
                for i in 0..s.len() {
                    let mut acc = db[i];
                    for k in 0..2 {
                        acc += prev[m][k][i] * mm[k][n][i];
                    }
                    next[m][n][i] = I * acc / gap;
                }
            }
        }
        for n in 0..2 {
            let start = -(0..2)
                .filter(|&m| m != n)
                .map(|m| next[m][n][0])
                .sum::<C64>();
            let integrand: Vec<C64> = (0..s.len())
                .map(|i| {
                    let src: C64 = (0..2)
                        .filter(|&k| k != n)
                        .map(|k| next[n][k][i] * mm[k][n][i])
                        .sum();
                    gamma[n][i].exp() * src
                })
                .collect();
            let acc = running_integral(&integrand, h);
            for i in 0..s.len() {
                next[n][n][i] = (-gamma[n][i]).exp() * (start - acc[i]);
            }
        }
        levels.push(next);
    }

    levels
        .iter()
        .map(|b| {
            (0..s.len())
                .map(|i| {
                    let vecs = path.eigvecs(s[i]);
                    let mut psi = CVector::zeros(2);
                    for m in 0..2 {
                        let phase = (-I * (energies[m] * s[i] / path.v)).exp();
                        for n in 0..2 {
                            psi.axpy(phase * b[m][n][i], &vecs[n]);
                        }
                    }
                    psi
                })
                .collect()
        })
        .collect()
}

/// Order-`p` term of the library's expansion in the lab basis, rephased so that it
/// starts from `reference` instead of the library's own choice of ground vector.
pub fn library_order_lab(
    flow: &dapt_core::spectrum::SpectralFlow,
    coeffs: &dapt_core::dapt::CoeffSet,
    p: usize,
    i: usize,
    reference: &CVector,
) -> CVector {
    let start = flow.basis(0, 0).column(0);
    let phase = reference.dot(&start).conj();
    let lab = flow
        .snapshot_matrix(i)
        .mul_vec(&dapt_core::dapt::order_amplitudes(coeffs, flow, p, 0, i));
    lab.scale(phase)
}

/// Random unitary from Gram-Schmidt on the columns of `a`.
pub fn gram_schmidt(a: &CMatrix) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.column(j);
        for q in &cols {
            let proj = q.dot(&v);
            v.axpy(-proj, q);
        }
        cols.push(v.normalized());
    }
    CMatrix::from_columns(&cols).unwrap()
}

pub fn matrix_from(parts: &[f64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        C64::new(parts[2 * (i * n + j)], parts[2 * (i * n + j) + 1])
    })
}

pub fn hermitian_from(parts: &[f64], n: usize) -> CMatrix {
    let a = matrix_from(parts, n);
    (&a + &a.adjoint()).scale_re(0.5)
}
