// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use dapt_core::conditions::{
    evaluate, max_ratio, min_plus, necessary_strong, necessary_weak, ratio_diagnostic,
};
use dapt_core::experiment::{run_conditions, Pipeline, Settings};
use dapt_core::linalg::CMatrix;
use dapt_core::models::{FourLevelModel, QuadraticModel};
use dapt_core::spectrum::HamiltonianPath;
use proptest::prelude::*;

fn four_level(b: f64, w: f64, theta: f64, v: f64) -> FourLevelModel {
    FourLevelModel::new(b, w, theta, 1.0, v).unwrap()
}

struct Shifted(FourLevelModel);

impl HamiltonianPath for Shifted {
    fn dim(&self) -> usize {
        4
    }
    fn hamiltonian(&self, s: f64) -> CMatrix {
        &self.0.hamiltonian(s) + &CMatrix::identity(4).scale_re(3.0 * s.sin() - 1.0)
    }
    fn derivative(&self, s: f64) -> Option<CMatrix> {
        Some(&self.0.derivative(s)? + &CMatrix::identity(4).scale_re(3.0 * s.cos()))
    }
    fn analytic_basis(&self, s: f64) -> Option<Vec<(f64, CMatrix)>> {
        let shift = 3.0 * s.sin() - 1.0;
        Some(
            self.0
                .analytic_basis(s)?
                .into_iter()
                .map(|(e, v)| (e + shift, v))
                .collect(),
        )
    }
    fn v(&self) -> f64 {
        self.0.v
    }
    fn hbar(&self) -> f64 {
        1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_never_exceeds_strong(b in 0.5f64..2.0, w in 0.0f64..1.5, theta in 0.0f64..PI, e0 in 0.3f64..2.0, lambda in 0.0f64..2.0) {
        let paths: [Box<dyn HamiltonianPath>; 2] = [
            Box::new(four_level(b, w, theta, 0.3)),
            Box::new(QuadraticModel::new(e0, lambda, theta, w, 0.3, 1.0).unwrap()),
        ];
        for path in &paths {
            let pipe = Pipeline::new(path.as_ref(), 2000, None).unwrap();
            let strong = necessary_strong(&pipe.flow, &pipe.mfield);
            let weak = necessary_weak(&pipe.flow, &pipe.mfield, &pipe.wz);
            for (s, wk) in strong[0].iter().zip(&weak[0]) {
                prop_assert!(wk <= s && *wk >= 0.0);
            }
        }
    }

    #[test]
    fn reports_ignore_energy_shift(b in 0.5f64..2.0, w in 0.0f64..1.5, theta in 0.0f64..PI) {
        let m = four_level(b, w, theta, 0.4);
        let s = Settings { n_steps: 1000, ..Settings::default() };
        let base = run_conditions(&m, &s).unwrap();
        let moved = run_conditions(&Shifted(m), &s).unwrap();
        prop_assert_eq!(base.necessary, moved.necessary);
        prop_assert_eq!(base.sufficient, moved.sufficient);
        let pairs = [
            (&base.rows.nec_strong, &moved.rows.nec_strong),
            (&base.rows.nec_weak, &moved.rows.nec_weak),
            (&base.rows.suf_a_lhs, &moved.rows.suf_a_lhs),
            (&base.rows.suf_b_lhs_max, &moved.rows.suf_b_lhs_max),
            (&base.rows.suf_b_rhs, &moved.rows.suf_b_rhs),
        ];
        for (x, y) in pairs {
            for (a, c) in x.iter().zip(y) {
                prop_assert!((a - c).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn strong_condition_closed_form() {
    for (b, w, theta) in [(1.0, 0.1, FRAC_PI_2), (2.0, 0.3, 0.4), (0.8, 0.5, 2.6)] {
        let m = four_level(b, w, theta, 0.2);
        let pipe = Pipeline::new(&m, 400, None).unwrap();
        let expect = (w * theta.sin() / (2.0 * b)) * (theta.sin() + theta.cos().abs());
        for x in &necessary_strong(&pipe.flow, &pipe.mfield)[0] {
            assert!((x - expect).abs() < 1e-8);
        }
    }
    // At theta = pi/2 the transport is diagonal and the weak form reaches the same value.
    let m = four_level(1.0, 0.1, FRAC_PI_2, 0.2);
    let pipe = Pipeline::new(&m, 400, None).unwrap();
    for x in &necessary_weak(&pipe.flow, &pipe.mfield, &pipe.wz)[0] {
        assert!((x - 0.05).abs() < 1e-8);
    }
}

#[test]
fn accumulated_condition_closed_form() {
    let (b, w, theta) = (1.3, 0.4, 0.9);
    let m = four_level(b, w, theta, 0.25);
    let pipe = Pipeline::new(&m, 1000, None).unwrap();
    let rep = evaluate(&pipe.flow, &pipe.mfield, &pipe.wz, 0.1, 1e-6).unwrap();
    for (t, x) in rep.t.iter().zip(&rep.suf_a_lhs) {
        assert!((x - w * w * t * theta.sin().powi(2) / b).abs() < 1e-10);
    }
    // The initial-time term of the second test is d_1 = 2 times the column term.
    for (sb, ns) in rep.suf_b_lhs_max.iter().zip(&rep.nec_strong) {
        assert!((sb - 5.0 * ns).abs() < 1e-10);
    }
}

#[test]
fn frozen_field_passes_both() {
    let m = four_level(1.0, 0.0, 1.0, 0.5);
    let res = run_conditions(
        &m,
        &Settings {
            n_steps: 200,
            ..Settings::default()
        },
    )
    .unwrap();
    assert!(res.necessary && res.sufficient);
    assert!(res
        .rows
        .nec_strong
        .iter()
        .chain(&res.rows.suf_a_lhs)
        .chain(&res.rows.suf_b_lhs_max)
        .all(|&x| x == 0.0));
}

#[test]
fn sufficient_implies_necessary() {
    for w in [0.001, 0.005, 0.01, 0.02, 0.05, 0.1] {
        for theta in [0.3, 0.8, FRAC_PI_2, 2.0, 2.8] {
            let m = four_level(1.0, w, theta, w);
            let rep = run_conditions(
                &m,
                &Settings {
                    n_steps: 1000,
                    ..Settings::default()
                },
            )
            .unwrap();
            if rep
                .rows
                .suf_b_lhs_max
                .iter()
                .zip(&rep.rows.suf_b_rhs)
                .all(|(l, r)| *l < 0.1 * r)
            {
                assert!(
                    rep.rows.nec_strong.iter().all(|&x| x < 0.1),
                    "w = {w}, theta = {theta}"
                );
            }
        }
    }
}

#[test]
fn strong_rotation_defeats_sufficiency() {
    for ratio in [1.0, 1.2, 2.0, 5.0] {
        for theta in [0.05, 0.7, FRAC_PI_2, 2.2, 3.0] {
            for v in [0.1, 1.0] {
                let m = four_level(1.0, ratio, theta, v);
                let s = Settings {
                    n_steps: 2000,
                    margin: 1.0,
                    ..Settings::default()
                };
                assert!(
                    !run_conditions(&m, &s).unwrap().sufficient,
                    "w/b = {ratio}, theta = {theta}"
                );
            }
        }
    }
}

#[test]
fn ratio_test_closed_form_at_lowest_order() {
    for (w, v, theta) in [(0.1, 0.1, 1.0), (2.0, 2.0, 1.0), (0.3, 0.5, 2.0)] {
        let m = four_level(1.0, w, theta, v);
        let pipe = Pipeline::new(&m, 2000, None).unwrap();
        let coeffs = pipe.coefficients(2).unwrap();
        let ratios = ratio_diagnostic(&coeffs);
        for g in 0..2 {
            for (i, r) in ratios[0][0][g].iter().enumerate() {
                let s = pipe.flow.s(i);
                match r {
                    Some(x) => {
                        assert!((x - w * w * s * theta.sin().powi(2) / (4.0 * v)).abs() < 1e-8)
                    }
                    None => assert_eq!(pipe.wz.get(0, i)[(0, g)].norm(), 0.0),
                }
            }
        }
        // Block 1 starts empty, so its lowest ratio has no denominator.
        assert!(ratios[0][1].iter().flatten().all(Option::is_none));
        let expect_max = w * w * theta.sin().powi(2) / (4.0 * v);
        assert!((max_ratio(&ratios, 0).unwrap() - expect_max).abs() < 1e-8);
    }
}

#[test]
fn ratio_test_not_applicable_for_constant_path() {
    let m = four_level(1.0, 0.0, 1.0, 0.5);
    let pipe = Pipeline::new(&m, 100, None).unwrap();
    let coeffs = pipe.coefficients(2).unwrap();
    let ratios = ratio_diagnostic(&coeffs);
    for p in 0..2 {
        for n in 0..2 {
            for g in 0..2 {
                for r in &ratios[p][n][g] {
                    assert!(matches!(r, None | Some(0.0)));
                }
            }
        }
    }
}

#[test]
fn non_null_minimum_near_start() {
    let m = four_level(1.0, 0.1, FRAC_PI_2 - 1e-9, 0.1);
    let pipe = Pipeline::new(&m, 100, None).unwrap();
    let u = pipe.wz.get(0, 1);
    let row = [u[(0, 0)].norm(), u[(0, 1)].norm()];
    assert!((min_plus(&row, 1e-6).unwrap() - 1.0).abs() < 1e-6);
}
