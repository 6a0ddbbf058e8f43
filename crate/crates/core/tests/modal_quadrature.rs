//! Quadrature-oracle checks of the modal closed forms: the normalization
//! constant against direct integration of `phi^2`, pseudo-orthogonality of
//! distinct eigenfunctions, and the wall conditions of every basis entry.

mod common;

use common::{c, integrate, room_1d, study_room_2d};
use num_complex::Complex64;
use rectroom::modal::{build_basis, eigenfunction_derivative, Basis1D};
use rectroom::SolverParams;

fn test_bases() -> Vec<Basis1D> {
    let params = SolverParams { n_max: 8, ..Default::default() };
    let mut bases = Vec::new();
    for (bm, bp, l, f) in [
        (c(0.0, 0.0), c(0.0, 0.0), 1.0, 700.0),
        (c(0.01, 0.01), c(0.02, 0.0), 1.0, 5000.0),
        (c(0.1, 0.1), c(0.2, 0.07), 1.0, 5000.0),
        (c(0.1, 0.06), c(0.0, 0.0), 1.0, 5000.0),
        (c(0.3, -0.2), c(0.05, 0.4), 1.3, 2200.0),
    ] {
        let room = room_1d(bm, bp, l);
        let ctx = room.wave_context(f).unwrap();
        bases.push(build_basis(&room.axes[0], &ctx, &params).unwrap());
    }
    // Both axes of the 2D study room.
    let room = study_room_2d();
    let ctx = room.wave_context(500.0).unwrap();
    for axis in &room.axes {
        bases.push(build_basis(axis, &ctx, &params).unwrap());
    }
    bases
}

#[test]
fn quadrature_oracle_self_check() {
    // The oracle must reproduce an independently known integral.
    let v = integrate(|x| c((3.0 * x).cos(), 0.0), 0.0, 2.0);
    let expect = (6.0f64).sin() / 3.0;
    assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-15);
}

#[test]
fn lambda_matches_integral_of_phi_squared() {
    for basis in test_bases() {
        let half = basis.length / 2.0;
        for entry in &basis.entries {
            let phi2 = |x: f64| {
                let p = entry.eval(basis.length, x).unwrap();
                p * p
            };
            let numeric = integrate(phi2, -half, half);
            assert!(
                (numeric - entry.lambda).norm() <= 1e-8 * entry.lambda.norm(),
                "q_hat = {}: quadrature {numeric} vs closed form {}",
                entry.root.q_hat,
                entry.lambda
            );
        }
    }
}

#[test]
fn distinct_eigenfunctions_are_pseudo_orthogonal() {
    for basis in test_bases() {
        let half = basis.length / 2.0;
        for (i, ei) in basis.entries.iter().enumerate() {
            for ej in basis.entries.iter().skip(i + 1) {
                let cross = integrate(
                    |x| {
                        ei.eval(basis.length, x).unwrap() * ej.eval(basis.length, x).unwrap()
                    },
                    -half,
                    half,
                );
                let scale = (ei.lambda.norm() * ej.lambda.norm()).sqrt();
                assert!(
                    cross.norm() <= 1e-6 * scale,
                    "pair ({}, {}): integral {cross} vs scale {scale:.3e}",
                    ei.root.q_hat,
                    ej.root.q_hat
                );
            }
        }
    }
}

#[test]
fn basis_entries_satisfy_both_wall_conditions() {
    for basis in test_bases() {
        let l = basis.length;
        let half = l / 2.0;
        let k = basis.wavenumber;
        // gamma = beta k l, so k beta = gamma / l.
        let kb_minus = basis.gamma.gamma_minus / l;
        let kb_plus = basis.gamma.gamma_plus / l;
        for entry in &basis.entries {
            let phi_scale = [-half, 0.0, half]
                .iter()
                .map(|&x| entry.eval(l, x).unwrap().norm())
                .fold(0.0f64, f64::max);
            let scale = (entry.k_hat.norm() + kb_minus.norm().max(kb_plus.norm()) + k * 0.0)
                .max(1e-300)
                * phi_scale;

            // Left wall, outward normal -x: -phi' + i k beta_- phi = 0.
            let res_l = -eigenfunction_derivative(entry.root.q_hat, entry.b_hat, l, -half)
                + Complex64::I * kb_minus * entry.eval(l, -half).unwrap();
            assert!(
                res_l.norm() <= 1e-8 * scale,
                "left wall at q_hat = {}: residual {:.3e} vs scale {:.3e}",
                entry.root.q_hat,
                res_l.norm(),
                scale
            );

            // Right wall, outward normal +x: phi' + i k beta_+ phi = 0.
            let res_r = eigenfunction_derivative(entry.root.q_hat, entry.b_hat, l, half)
                + Complex64::I * kb_plus * entry.eval(l, half).unwrap();
            assert!(
                res_r.norm() <= 1e-8 * scale,
                "right wall at q_hat = {}: residual {:.3e} vs scale {:.3e}",
                entry.root.q_hat,
                res_r.norm(),
                scale
            );
        }
    }
}
