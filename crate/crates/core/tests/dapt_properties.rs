// SPDX-License-Identifier: Apache-2.0

mod common;

use dapt_core::dapt::{
    assemble_state, compute, first_order, ground_start, recurse_order, refinement_check,
    zeroth_order, MAX_ORDER_CAP,
};
use dapt_core::experiment::Pipeline;
use dapt_core::linalg::{CMatrix, CVector, C64};
use dapt_core::models::{FourLevelModel, QuadraticModel};
use dapt_core::spectrum::HamiltonianPath;
use dapt_core::DaptError;
use proptest::prelude::*;

fn four_level(b: f64, w: f64, theta: f64, v: f64) -> FourLevelModel {
    FourLevelModel::new(b, w, theta, 1.0, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn initial_sums_vanish_at_every_order(theta in 0.0f64..3.1, w in 0.0f64..1.0, e0 in 0.5f64..2.0, lambda in 0.0f64..2.0) {
        let paths: [Box<dyn HamiltonianPath>; 2] = [
            Box::new(four_level(1.0, w, theta, 0.3)),
            Box::new(QuadraticModel::new(e0, lambda, theta, w, 0.3, 1.0).unwrap()),
        ];
        for path in &paths {
            let pipe = Pipeline::new(path.as_ref(), 400, None).unwrap();
            let coeffs = pipe.coefficients(4).unwrap();
            for level in &coeffs.levels[1..] {
                prop_assert!(level.sum_rule_residual() < 1e-8);
            }
            let asm = assemble_state(&coeffs, &pipe.flow, 4, 0).unwrap();
            prop_assert!((&asm.per_order[0][0].amplitudes - &CVector::basis(4, 0)).max_abs() < 1e-14);
            for p in 1..=4 {
                prop_assert!(asm.per_order[p][0].amplitudes.max_abs() < 1e-8);
            }
        }
    }
}

fn first_order_both_ways(path: &dyn HamiltonianPath, n: usize) -> f64 {
    let pipe = Pipeline::new(path, n, None).unwrap();
    let b0 = ground_start(&pipe.flow);
    let mut closed = zeroth_order(&pipe.flow, &pipe.wz, &b0, 1).unwrap();
    first_order(&mut closed, &pipe.flow, &pipe.mfield, &pipe.wz).unwrap();
    let mut generic = zeroth_order(&pipe.flow, &pipe.wz, &b0, 1).unwrap();
    recurse_order(&mut generic, &pipe.flow, &pipe.mfield, &pipe.wz).unwrap();
    let mut worst: f64 = 0.0;
    for m in 0..2 {
        for n in 0..2 {
            for i in 0..pipe.flow.len() {
                worst = worst.max((closed.get(1, m, n, i) - generic.get(1, m, n, i)).max_abs());
            }
        }
    }
    worst
}

#[test]
fn generic_recursion_reproduces_closed_first_order() {
    assert!(first_order_both_ways(&four_level(1.0, 0.3, 1.0, 0.3), 4000) < 1e-8);
    assert!(first_order_both_ways(&four_level(0.7, 0.2, 2.4, 0.5), 4000) < 1e-8);
    assert!(
        first_order_both_ways(
            &QuadraticModel::new(1.0, 1.0, 0.1, 0.3, 0.3, 1.0).unwrap(),
            4000
        ) < 1e-8
    );
}

#[test]
fn third_order_error_scaling() {
    let vs = [0.01, 0.02, 0.04, 0.08];
    let errs: Vec<f64> = vs
        .iter()
        .map(|&v| {
            let m = four_level(1.0, v, 1.0, v);
            let pipe = Pipeline::new(&m, 16000, None).unwrap();
            let coeffs = pipe.coefficients(3).unwrap();
            let asm = assemble_state(&coeffs, &pipe.flow, 3, 0).unwrap();
            let last = pipe.flow.len() - 1;
            let mut acc = CVector::zeros(4);
            for p in 0..=3 {
                acc.axpy(
                    C64::from(v.powi(p)),
                    &asm.per_order[p as usize][last].amplitudes,
                );
            }
            (&m.exact_amplitudes(1.0 / v) - &acc).norm()
        })
        .collect();
    let k = (errs[0] / errs[3]).ln() / (vs[0] / vs[3]).ln();
    assert!((k - 4.0).abs() <= 0.2, "slope {k}, errors {errs:?}");
}

#[test]
fn grid_refinement_settles() {
    let m = QuadraticModel::new(1.0, 1.0, 0.1, 0.3, 0.3, 1.0).unwrap();
    let coarse = refinement_check(&m, 800, 1e-8, 2).unwrap();
    let fine = refinement_check(&m, 1600, 1e-8, 2).unwrap();
    assert!(
        fine < 1e-5 && fine < coarse / 3.0,
        "coarse {coarse}, fine {fine}"
    );
}

#[test]
fn order_limits_are_enforced() {
    let m = four_level(1.0, 0.2, 1.0, 0.2);
    let pipe = Pipeline::new(&m, 100, None).unwrap();
    let b0 = ground_start(&pipe.flow);
    assert!(matches!(
        compute(&pipe.flow, &pipe.mfield, &pipe.wz, &b0, MAX_ORDER_CAP + 1),
        Err(DaptError::OrderExceeded { .. })
    ));
    let coeffs = compute(&pipe.flow, &pipe.mfield, &pipe.wz, &b0, 2).unwrap();
    assert!(matches!(
        assemble_state(&coeffs, &pipe.flow, 3, 0),
        Err(DaptError::OrderExceeded { .. })
    ));
    let mut full = coeffs.clone();
    assert!(recurse_order(&mut full, &pipe.flow, &pipe.mfield, &pipe.wz).is_err());
    assert!(compute(&pipe.flow, &pipe.mfield, &pipe.wz, &[C64::from(1.0)], 1).is_err());
}

/// `diag((s - 1/2)^2, -(s - 1/2)^2)`: the two levels touch at `s = 1/2`.
struct Touching;

impl HamiltonianPath for Touching {
    fn dim(&self) -> usize {
        2
    }
    fn hamiltonian(&self, s: f64) -> CMatrix {
        let e = (s - 0.5) * (s - 0.5);
        CMatrix::from_diag(&[C64::from(-e), C64::from(e)])
    }
    fn v(&self) -> f64 {
        0.1
    }
    fn hbar(&self) -> f64 {
        1.0
    }
}

#[test]
fn touching_levels_are_refused() {
    let err = Pipeline::new(&Touching, 100, Some(1e-6))
        .err()
        .expect("must fail");
    assert!(
        matches!(
            err,
            DaptError::StructureChanged { .. } | DaptError::GapClosure { .. }
        ),
        "{err}"
    );
}

#[test]
fn higher_orders_improve_a_slow_run() {
    let m = four_level(1.0, 0.05, 1.0, 0.05);
    let pipe = Pipeline::new(&m, 4000, None).unwrap();
    let coeffs = pipe.coefficients(2).unwrap();
    let last = pipe.flow.len() - 1;
    let exact = dapt_core::state::QuantumState {
        basis: dapt_core::state::Basis::Snapshot,
        s: 1.0,
        amplitudes: m.exact_amplitudes(1.0 / m.v),
    };
    let infid: Vec<f64> = (0..=2)
        .map(|k| {
            let asm = assemble_state(&coeffs, &pipe.flow, k, 0).unwrap();
            dapt_core::models::infidelity(&exact, &asm.truncated[last]).unwrap()
        })
        .collect();
    assert!(infid[2] < infid[1] && infid[1] < infid[0], "{infid:?}");
}
