//! Ginzburg–Landau energy, tracking functionals, reduced gradients and
//! interface diagnostics.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::fem;
use crate::math;
use crate::mesh::MeshCG1;
use crate::sparse::SparseMatrix;
use crate::wave::{trapezoid_weights, StateTrajectory, WaveSolver};

/// Values outside `[0, 1]` by more than this are reported as infeasible.
pub const BOX_SLACK: f64 = 1e-12;

/// Interface width ε and regularization weight γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLParams {
    pub epsilon: f64,
    pub gamma: f64,
}

impl GLParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter("epsilon must be positive"));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("gamma must be positive"));
        }
        Ok(())
    }
}

/// One evaluation of the regularized reduced objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEval {
    pub j_value: f64,
    pub gl_energy: f64,
    /// `j_value + γ gl_energy`
    pub total: f64,
    /// Lumped-L² Riesz representative of `j'(w)`.
    pub gradient: Vec<f64>,
}

impl ObjectiveEval {
    pub fn new(j_value: f64, gl_energy: f64, gamma: f64, gradient: Vec<f64>) -> Self {
        ObjectiveEval {
            j_value,
            gl_energy,
            total: j_value + gamma * gl_energy,
            gradient,
        }
    }
}

fn check_box(w: &[f64]) -> Result<()> {
    for (index, &value) in w.iter().enumerate() {
        if !(-BOX_SLACK..=1.0 + BOX_SLACK).contains(&value) {
            return Err(Error::Infeasible { index, value });
        }
    }
    Ok(())
}

/// `E_ε(w) = (ε/2) wᵀK₁w + (1/ε) Σ d_i w_i(1 − w_i)` from precomputed
/// lumped weights and unit stiffness.
pub fn gl_energy_with(w: &[f64], eps: f64, lumped: &[f64], laplacian: &SparseMatrix) -> Result<f64> {
    check_len(lumped.len(), w.len())?;
    check_box(w)?;
    let grad_term = 0.5 * eps * laplacian.bilinear(w, w);
    let well: f64 = lumped.iter().zip(w).map(|(d, v)| d * v * (1.0 - v)).sum();
    Ok(grad_term + well / eps)
}

/// Euclidean gradient of [`gl_energy_with`]: `ε K₁w + (1/ε) d∘(1 − 2w)`.
pub fn gl_gradient_with(w: &[f64], eps: f64, lumped: &[f64], laplacian: &SparseMatrix) -> Result<Vec<f64>> {
    check_len(lumped.len(), w.len())?;
    check_box(w)?;
    let mut g = laplacian.mul_vec(w);
    for ((gi, d), v) in g.iter_mut().zip(lumped).zip(w) {
        *gi = eps * *gi + d * (1.0 - 2.0 * v) / eps;
    }
    Ok(g)
}

pub fn gl_energy(w: &[f64], eps: f64, mesh: &MeshCG1) -> Result<f64> {
    gl_energy_with(w, eps, &fem::lumped_mass(mesh), &fem::assemble_laplacian(mesh))
}

pub fn gl_gradient(w: &[f64], eps: f64, mesh: &MeshCG1) -> Result<Vec<f64>> {
    gl_gradient_with(w, eps, &fem::lumped_mass(mesh), &fem::assemble_laplacian(mesh))
}

/// Desired state for the tracking term.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Static(Vec<f64>),
    Trajectory(Vec<Vec<f64>>),
}

impl Target {
    pub fn frame(&self, m: usize) -> &[f64] {
        match self {
            Target::Static(v) => v,
            Target::Trajectory(frames) => &frames[m],
        }
    }

    fn check(&self, n_frames: usize, n_nodes: usize) -> Result<()> {
        match self {
            Target::Static(v) => check_len(n_nodes, v.len()),
            Target::Trajectory(frames) => {
                check_len(n_frames, frames.len())?;
                frames.iter().try_for_each(|f| check_len(n_nodes, f.len()))
            }
        }
    }
}

/// `mask ∘ (u − u_d)` frame by frame.
pub fn tracking_residual(forward: &StateTrajectory, target: &Target, mask: &[f64]) -> Result<StateTrajectory> {
    let n = mask.len();
    target.check(forward.frames.len(), n)?;
    let frames = forward
        .frames
        .iter()
        .enumerate()
        .map(|(m, u)| {
            check_len(n, u.len())?;
            Ok(u.iter()
                .zip(target.frame(m))
                .zip(mask)
                .map(|((ui, di), mi)| mi * (ui - di))
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(StateTrajectory {
        frames,
        tau: forward.tau,
    })
}

/// `½ ∫₀ᵀ ∫_D (u − u_d)²` with the trapezoidal rule in time and lumped
/// quadrature in space; `focal_mask` is one on nodes in `D`, zero elsewhere.
pub fn tracking_objective(
    forward: &StateTrajectory,
    target: &Target,
    focal_mask: &[f64],
    lumped: &[f64],
) -> Result<f64> {
    check_len(lumped.len(), focal_mask.len())?;
    let residual = tracking_residual(forward, target, focal_mask)?;
    let theta = trapezoid_weights(forward.n_steps(), forward.tau);
    Ok(0.5
        * residual
            .frames
            .iter()
            .zip(&theta)
            .map(|(r, th)| th * math::weighted_dot(lumped, r, r))
            .sum::<f64>())
}

/// Lumped Riesz representative `g` of `j'(w)`, so that `Σ d_k g_k ξ_k`
/// equals the derivative of the discrete reduced objective in direction ξ.
pub fn reduced_gradient_wave(
    solver: &WaveSolver<'_>,
    forward: &StateTrajectory,
    adjoint: &StateTrajectory,
) -> Result<Vec<f64>> {
    let mut g = solver.control_derivative(forward, adjoint)?;
    for (gi, d) in g.iter_mut().zip(&solver.lumped) {
        *gi /= d;
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceDiagnostics {
    /// Lumped measure of `{0.1 ≤ w ≤ 0.9}` relative to `|Ω|`.
    pub nonbinary_fraction: f64,
    /// Length of the 0.5 level line of the CG1 interpolant.
    pub tv_binarized: f64,
}

pub const NONBINARY_BAND: (f64, f64) = (0.1, 0.9);
pub const BINARY_THRESHOLD: f64 = 0.5;

pub fn nonbinary_fraction(w: &[f64], lumped: &[f64]) -> f64 {
    let total: f64 = lumped.iter().sum();
    let (lo, hi) = NONBINARY_BAND;
    let band: f64 = lumped
        .iter()
        .zip(w)
        .filter(|(_, &v)| (lo..=hi).contains(&v))
        .fold(0.0, |acc, (d, _)| acc + d);
    band / total
}

/// Perimeter of `{w > 0.5}` measured as the length of the 0.5 level line of
/// the piecewise-linear interpolant, one straight segment per cut triangle.
pub fn binarized_perimeter(w: &[f64], mesh: &MeshCG1) -> f64 {
    let mut total = 0.0;
    for tri in &mesh.triangles {
        let s = tri.map(|k| w[k] - BINARY_THRESHOLD);
        let inside = s.map(|v| v > 0.0);
        if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
            continue;
        }
        let mut pts = [[0.0; 2]; 2];
        let mut found = 0;
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            if inside[a] != inside[b] && found < 2 {
                let t = s[a] / (s[a] - s[b]);
                let (pa, pb) = (mesh.nodes[tri[a]], mesh.nodes[tri[b]]);
                pts[found] = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
                found += 1;
            }
        }
        let dx = pts[1][0] - pts[0][0];
        let dy = pts[1][1] - pts[0][1];
        total += math::sqrt(dx * dx + dy * dy);
    }
    total
}

pub fn interface_diagnostics(w: &[f64], mesh: &MeshCG1) -> Result<InterfaceDiagnostics> {
    check_len(mesh.n_nodes(), w.len())?;
    Ok(InterfaceDiagnostics {
        nonbinary_fraction: nonbinary_fraction(w, &fem::lumped_mass(mesh)),
        tv_binarized: binarized_perimeter(w, mesh),
    })
}
