mod common;

use common::{random_field, rng};
use gltr_core::error::Error;
use gltr_core::fem;
use gltr_core::linsolve::{cg_solve, pcg, pcg_monitored, SolverOptions};
use gltr_core::mesh::{MeshCG1, Rect};
use gltr_core::sparse::SparseMatrix;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn dense(a: &SparseMatrix) -> DMatrix<f64> {
    let rows = a.to_dense();
    DMatrix::from_fn(a.n_rows, a.n_cols, |i, j| rows[i][j])
}

fn wave_step_operator(mesh: &MeshCG1, tau: f64, sigma: f64) -> SparseMatrix {
    let m = fem::assemble_mass(mesh);
    let k = fem::assemble_laplacian(mesh);
    SparseMatrix::combine(&[(1.0, &m), (tau * tau * sigma * 20.0, &k)]).unwrap()
}

#[test]
fn mass_matrix_is_positive_definite() {
    for n in [1, 2, 4, 8, 16] {
        let mesh = MeshCG1::build(Rect::new(-1.0, 1.0, -1.0, 2.0), n, n).unwrap();
        let eig = dense(&fem::assemble_mass(&mesh)).symmetric_eigen();
        assert!(eig.eigenvalues.min() > 0.0, "{n}: {}", eig.eigenvalues.min());
    }
}

#[test]
fn stiffness_is_positive_semidefinite_with_constant_kernel() {
    let mesh = MeshCG1::build(Rect::UNIT, 6, 5).unwrap();
    let k = fem::assemble_laplacian(&mesh);
    let eig = dense(&k).symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!(vals[0].abs() < 1e-12 && vals[1] > 1e-6);
}

#[test]
fn cg_matches_dense_solve_on_a_wave_step_operator() {
    let mesh = MeshCG1::build(Rect::UNIT, 8, 8).unwrap();
    let a = wave_step_operator(&mesh, 0.02, 0.25);
    let mut r = rng(41);
    let b = random_field(&mut r, mesh.n_nodes(), -1.0, 1.0);
    let x = cg_solve(
        &a,
        &b,
        &vec![0.0; b.len()],
        &SolverOptions {
            tol: 1e-13,
            max_iter: 1000,
        },
    )
    .unwrap();
    let reference = dense(&a).lu().solve(&DVector::from_vec(b)).unwrap();
    for (u, v) in x.iter().zip(reference.iter()) {
        assert!((u - v).abs() <= 1e-9, "{u} vs {v}");
    }
}

#[test]
fn non_convergence_reports_the_residual() {
    let mesh = MeshCG1::build(Rect::UNIT, 8, 8).unwrap();
    let a = wave_step_operator(&mesh, 0.5, 0.25);
    let b = vec![1.0; mesh.n_nodes()];
    match pcg(
        &a,
        &b,
        &vec![0.0; b.len()],
        &SolverOptions {
            tol: 1e-14,
            max_iter: 2,
        },
    ) {
        Err(Error::NotConverged { iterations, residual }) => {
            assert_eq!(iterations, 2);
            assert!(residual > 1e-14);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn energy_norm_error_decreases_monotonically() {
    let mesh = MeshCG1::build(Rect::UNIT, 8, 8).unwrap();
    let a = wave_step_operator(&mesh, 0.2, 0.25);
    let mut r = rng(42);
    let b = random_field(&mut r, mesh.n_nodes(), -1.0, 1.0);
    let x0 = vec![0.0; b.len()];
    let exact = dense(&a).lu().solve(&DVector::from_vec(b.clone())).unwrap();
    let mut errors = Vec::new();
    pcg_monitored(
        &a,
        &b,
        &x0,
        &SolverOptions {
            tol: 1e-12,
            max_iter: 1000,
        },
        |_, x, _| {
            let e: Vec<f64> = x.iter().zip(exact.iter()).map(|(u, v)| u - v).collect();
            errors.push(a.bilinear(&e, &e).sqrt());
        },
    )
    .unwrap();
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-10), "{errors:?}");
    }
}

fn permuted(a: &SparseMatrix, perm: &[usize]) -> SparseMatrix {
    // new[i][j] = old[perm[i]][perm[j]]
    let mut inverse = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    let mut trip = Vec::new();
    for r in 0..a.n_rows {
        for (c, v) in a.row(r) {
            trip.push((inverse[r], inverse[c], v));
        }
    }
    SparseMatrix::from_triplets(a.n_rows, a.n_cols, trip)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_is_permutation_invariant(seed in 0u64..1000, tau in 0.01..0.5f64) {
        use rand::seq::SliceRandom;
        let mesh = MeshCG1::build(Rect::UNIT, 8, 8).unwrap();
        let a = wave_step_operator(&mesh, tau, 0.25);
        let mut r = rng(seed);
        let b = random_field(&mut r, mesh.n_nodes(), -1.0, 1.0);
        let mut perm: Vec<usize> = (0..b.len()).collect();
        perm.shuffle(&mut r);
        let opts = SolverOptions { tol: 1e-13, max_iter: 1000 };
        let x = cg_solve(&a, &b, &vec![0.0; b.len()], &opts).unwrap();
        let pb: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
        let px = cg_solve(&permuted(&a, &perm), &pb, &vec![0.0; b.len()], &opts).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            prop_assert!((px[i] - x[p]).abs() <= 1e-9);
        }
    }

    #[test]
    fn assembled_operators_are_symmetric_with_sorted_rows(
        nx in 1usize..7,
        ny in 1usize..7,
        seed in 0u64..1000,
    ) {
        let mesh = MeshCG1::build(Rect::new(-1.0, 1.0, -1.0, 2.0), nx, ny).unwrap();
        let mut r = rng(seed);
        let coeff = random_field(&mut r, mesh.n_triangles(), 0.1, 10.0);
        let k = fem::assemble_stiffness(&mesh, &coeff).unwrap();
        let m = fem::assemble_mass(&mesh);
        for a in [&k, &m] {
            prop_assert!(a.asymmetry() <= 1e-12 * a.max_abs());
            for row in 0..a.n_rows {
                let cols: Vec<usize> = a.row(row).map(|(c, _)| c).collect();
                prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
            }
        }
        for s in k.row_sums() {
            prop_assert!(s.abs() <= 1e-12 * k.max_abs());
        }
        let total: f64 = m.row_sums().iter().sum();
        prop_assert!((total - 6.0).abs() <= 1e-12 * 6.0);
    }
}
