//! Adjoint gradients against central finite differences.

mod common;

use common::{random_field, rng, tight, wave_problem, WAVE_DOMAIN};
use gltr_core::elliptic::{ControlOperator, EllipticConfig, EllipticSolver};
use gltr_core::mesh::{MeshCG1, Rect};
use gltr_core::problem::{EllipticTracking, ReducedObjective};

fn directional_errors<P: ReducedObjective>(p: &P, w: &[f64], dirs: &[Vec<f64>], h: f64) -> Vec<f64> {
    let (_, g) = p.value_and_gradient(w).unwrap();
    let d = p.lumped();
    dirs.iter()
        .map(|xi| {
            let plus: Vec<f64> = w.iter().zip(xi).map(|(a, b)| a + h * b).collect();
            let minus: Vec<f64> = w.iter().zip(xi).map(|(a, b)| a - h * b).collect();
            let fd = (p.value(&plus).unwrap() - p.value(&minus).unwrap()) / (2.0 * h);
            let adj: f64 = g.iter().zip(xi).zip(d).map(|((gi, x), di)| di * gi * x).sum();
            (fd - adj).abs() / adj.abs()
        })
        .collect()
}

fn elliptic(mesh: &MeshCG1, operator: ControlOperator) -> EllipticTracking<'_> {
    let cfg = EllipticConfig {
        nu: 1.0,
        source: Some(mesh.interpolate(|x, y| x - y)),
        operator,
    };
    let solver = EllipticSolver::new(mesh, cfg, tight()).unwrap();
    let target = mesh.interpolate(|x, y| 0.05 * (3.0 * x).sin() * y);
    EllipticTracking::new(solver, target).unwrap()
}

#[test]
fn elliptic_gradient_matches_finite_differences() {
    let mesh = MeshCG1::build(Rect::UNIT, 8, 8).unwrap();
    let mut r = rng(11);
    for op in [ControlOperator::Identity, ControlOperator::Mollifier { radius: 0.15 }] {
        let p = elliptic(&mesh, op);
        let w = random_field(&mut r, mesh.n_nodes(), 0.2, 0.8);
        let dirs: Vec<Vec<f64>> = (0..5)
            .map(|_| random_field(&mut r, mesh.n_nodes(), -1.0, 1.0))
            .collect();
        let errs = directional_errors(&p, &w, &dirs, 1e-3);
        assert!(errs.iter().all(|&e| e <= 1e-6), "{op:?}: {errs:?}");
    }
}

#[test]
fn wave_gradient_matches_finite_differences() {
    let mesh = MeshCG1::build(WAVE_DOMAIN, 16, 16).unwrap();
    let p = wave_problem(&mesh, 5.0, 32);
    let mut r = rng(12);
    let w = random_field(&mut r, mesh.n_nodes(), 0.2, 0.8);
    let dirs: Vec<Vec<f64>> = (0..3)
        .map(|_| random_field(&mut r, mesh.n_nodes(), -1.0, 1.0))
        .collect();
    let errs = directional_errors(&p, &w, &dirs, 1e-4);
    assert!(errs.iter().all(|&e| e <= 1e-3), "{errs:?}");
}

#[test]
fn wave_gradient_is_exact_for_the_discrete_objective() {
    // The scheme is differentiated exactly, so agreement is limited by the
    // finite-difference truncation and solver tolerance only.
    let mesh = MeshCG1::build(WAVE_DOMAIN, 8, 8).unwrap();
    let p = wave_problem(&mesh, 2.0, 24);
    let mut r = rng(13);
    let w = random_field(&mut r, mesh.n_nodes(), 0.3, 0.7);
    let dirs = vec![random_field(&mut r, mesh.n_nodes(), -1.0, 1.0)];
    let errs = directional_errors(&p, &w, &dirs, 1e-5);
    assert!(errs[0] <= 1e-6, "{errs:?}");
}
