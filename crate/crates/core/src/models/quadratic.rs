// SPDX-License-Identifier: Apache-2.0

//! Doubly degenerate model with a quadratic gap profile.
//!
//! `H(s) = (1/sqrt 2) [[0, H1], [H1^dagger, 0]]` with
//! `H1 = E(s) [[-1, e^{-i theta}], [e^{i theta}, 1]]`, `E(s) = E0 + lambda (s - 1/2)^2`
//! and `theta(s) = theta0 + w s^2`. Energies are `-E(s)` and `+E(s)`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{DaptError, Result};
use crate::linalg::{CMatrix, CVector, C64, I, ZERO};
use crate::spectrum::HamiltonianPath;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticModel {
    pub e0: f64,
    pub lambda: f64,
    pub theta0: f64,
    pub w: f64,
    pub v: f64,
    pub hbar: f64,
}

impl QuadraticModel {
    pub fn new(e0: f64, lambda: f64, theta0: f64, w: f64, v: f64, hbar: f64) -> Result<Self> {
        for (name, x) in [("E0", e0), ("v", v), ("hbar", hbar)] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(DaptError::InvalidArgument(format!(
                    "{name} = {x} must be positive"
                )));
            }
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(DaptError::InvalidArgument(format!(
                "lambda = {lambda} must be non-negative"
            )));
        }
        if !theta0.is_finite() || !w.is_finite() {
            return Err(DaptError::InvalidArgument(
                "theta0 and w must be finite".into(),
            ));
        }
        Ok(Self {
            e0,
            lambda,
            theta0,
            w,
            v,
            hbar,
        })
    }

    pub fn energy(&self, s: f64) -> f64 {
        self.e0 + self.lambda * (s - 0.5) * (s - 0.5)
    }

    pub fn angle(&self, s: f64) -> f64 {
        self.theta0 + self.w * s * s
    }

    /// Gap `2 E(s)`.
    pub fn gap(&self, s: f64) -> f64 {
        2.0 * self.energy(s)
    }

    /// `epsilon(s) = sqrt 2 hbar v / E(s)`.
    pub fn epsilon(&self, s: f64) -> f64 {
        SQRT_2 * self.hbar * self.v / self.energy(s)
    }

    /// Snapshot eigenvectors `|0^0>, |0^1>, |1^0>, |1^1>`.
    pub fn snapshot_basis(&self, s: f64) -> [CVector; 4] {
        let e = (I * self.angle(s)).exp();
        let r2 = C64::from(SQRT_2);
        let one = C64::from(1.0);
        let vec = |a: C64, b: C64, c: C64, d: C64| {
            CVector::from_vec(vec![a * 0.5, b * 0.5, c * 0.5, d * 0.5])
        };
        [
            vec(e.conj(), one, ZERO, -r2),
            vec(one, -e, r2, ZERO),
            vec(e.conj(), one, ZERO, r2),
            vec(one, -e, -r2, ZERO),
        ]
    }

    /// Lab-basis amplitudes of `|0^0(0)>`.
    pub fn initial_state(&self) -> CVector {
        let e = (-I * self.theta0).exp();
        CVector::from_vec(vec![
            e * 0.5,
            C64::from(0.5),
            ZERO,
            C64::from(-FRAC_1_SQRT_2),
        ])
    }
}

impl HamiltonianPath for QuadraticModel {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        let e = self.energy(s) * FRAC_1_SQRT_2;
        let ph = (I * self.angle(s)).exp();
        let h1 = [[C64::from(-e), ph.conj() * e], [ph * e, C64::from(e)]];
        let mut h = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                h[(i, 2 + j)] = h1[i][j];
                h[(2 + j, i)] = h1[i][j].conj();
            }
        }
        h
    }

    fn derivative(&self, s: f64) -> Option<CMatrix> {
        let e = self.energy(s) * FRAC_1_SQRT_2;
        let de = 2.0 * self.lambda * (s - 0.5) * FRAC_1_SQRT_2;
        let th_dot = 2.0 * self.w * s;
        let ph = (I * self.angle(s)).exp();
        let dph = I * th_dot * ph;
        let h1 = [
            [C64::from(-de), ph.conj() * de + dph.conj() * e],
            [ph * de + dph * e, C64::from(de)],
        ];
        let mut h = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                h[(i, 2 + j)] = h1[i][j];
                h[(2 + j, i)] = h1[i][j].conj();
            }
        }
        Some(h)
    }

    fn analytic_basis(&self, s: f64) -> Option<Vec<(f64, CMatrix)>> {
        let [v00, v01, v10, v11] = self.snapshot_basis(s);
        let e = self.energy(s);
        Some(vec![
            (-e, CMatrix::from_columns(&[v00, v01]).ok()?),
            (e, CMatrix::from_columns(&[v10, v11]).ok()?),
        ])
    }

    fn v(&self) -> f64 {
        self.v
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_epsilons() {
        let m = QuadraticModel::new(1.5, 0.0, 0.1, 0.5, 0.5, 1.0).unwrap();
        assert!((m.epsilon(0.3) - 0.4714).abs() < 1e-4);
        let m = QuadraticModel::new(1.5, 0.0, 0.1, 1.5, 1.5, 1.0).unwrap();
        assert!((m.epsilon(0.3) - 1.414).abs() < 1e-3);
    }

    #[test]
    fn gap_minimum_at_half() {
        let m = QuadraticModel::new(1.0, 1.0, 0.1, 0.3, 0.3, 1.0).unwrap();
        assert_eq!(m.gap(0.5), 2.0);
        assert!(m.gap(0.0) > m.gap(0.5) && m.gap(1.0) > m.gap(0.5));
    }

    #[test]
    fn initial_state_is_ground_vector() {
        let m = QuadraticModel::new(1.0, 1.0, 0.4, 0.3, 0.3, 1.0).unwrap();
        assert!((&m.initial_state() - &m.snapshot_basis(0.0)[0]).max_abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference() {
        let m = QuadraticModel::new(1.0, 0.7, 0.4, 0.9, 0.3, 1.0).unwrap();
        let (s, h) = (0.37, 1e-6);
        let fd = (&m.hamiltonian(s + h) - &m.hamiltonian(s - h)).scale_re(0.5 / h);
        assert!((&fd - &m.derivative(s).unwrap()).max_abs() < 1e-8);
    }
}
