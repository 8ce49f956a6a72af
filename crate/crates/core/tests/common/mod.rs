#![allow(dead_code)]

use gltr_core::linsolve::SolverOptions;
use gltr_core::mesh::{MeshCG1, Rect};
use gltr_core::objective::Target;
use gltr_core::problem::WaveTracking;
use gltr_core::wave::{InitialData, SourceSpec, WaveConfig, WaveSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WAVE_DOMAIN: Rect = Rect {
    x_min: -1.0,
    x_max: 1.0,
    y_min: -1.0,
    y_max: 2.0,
};

pub fn tight() -> SolverOptions {
    SolverOptions {
        tol: 1e-13,
        max_iter: 20_000,
    }
}

pub fn ricker_source() -> SourceSpec {
    SourceSpec {
        amplitude: 50.0,
        center: [0.0, -0.5],
        spatial_width: 0.1,
        f0: 1.5,
        t0: 0.7,
    }
}

pub fn wave_config(t_final: f64, n_steps: usize) -> WaveConfig {
    WaveConfig {
        c_sq: 20.0,
        b: 1.25e-2,
        sigma: 0.25,
        t_final,
        n_steps,
        source: ricker_source(),
        u0: InitialData::Zero,
        u1: InitialData::Zero,
    }
}

/// Indicator of the disk of radius 0.3 around (0, 1.25) and a Gaussian
/// target supported there.
pub fn focal(mesh: &MeshCG1) -> (Vec<f64>, Vec<f64>) {
    let mask = mesh.interpolate(|x, y| {
        if x * x + (y - 1.25) * (y - 1.25) <= 0.09 {
            1.0
        } else {
            0.0
        }
    });
    let target = mesh.interpolate(|x, y| 0.5 * (-(x * x + (y - 1.25) * (y - 1.25)) / 0.02).exp());
    (mask, target)
}

pub fn wave_problem(mesh: &MeshCG1, t_final: f64, n_steps: usize) -> WaveTracking<'_> {
    let solver = WaveSolver::new(mesh, wave_config(t_final, n_steps), tight()).unwrap();
    let (mask, target) = focal(mesh);
    WaveTracking::new(solver, Target::Static(target), mask).unwrap()
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
