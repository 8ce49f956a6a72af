//! Strongly damped acoustic wave equation
//! `u_tt − div(a(w)∇u) − bΔu_t = f` with homogeneous Neumann data,
//! discretized by CG1 in space and continuous piecewise-linear finite
//! elements in time, written as a two-step scheme.
//!
//! With `A = K_{a(w)}`, `K₁` the unit stiffness and `M` the mass matrix the
//! scheme reads, for `1 ≤ i ≤ N−1`,
//!
//! ```text
//! C₊ u^{i+1} + C₀ u^i + C₋ u^{i−1} = F_i
//! C₊ = M/τ + τσA + (b/2)K₁,  C₀ = −2M/τ + τ(1−2σ)A,  C₋ = M/τ + τσA − (b/2)K₁
//! ```
//!
//! and the first step is `C₊ u¹ = (u₁, φ) + F₀ + (M/τ − τ(½−σ)A + (b/2)K₁) u⁰`
//! with `u⁰ = P₀u₀`. The adjoint recursion marches backward from `p^N = 0`
//! with the roles of `C₊` and `C₋` swapped, which makes it the exact
//! transpose of the forward scheme.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{check_len, Error, Result};
use crate::fem;
use crate::linsolve::{cg_solve, SolverOptions};
use crate::math;
use crate::mesh::MeshCG1;
use crate::sparse::SparseMatrix;

/// Frames whose Euclidean norm exceeds this are treated as a blowup.
pub const BLOWUP_NORM: f64 = 1e12;

/// Ricker wavelet in time times an isotropic Gaussian bump in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub spatial_width: f64,
    /// Central frequency.
    pub f0: f64,
    /// Delay of the peak.
    pub t0: f64,
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.spatial_width > 0.0) {
            return Err(Error::InvalidParameter("source spatial_width must be positive"));
        }
        if !(self.f0 > 0.0) {
            return Err(Error::InvalidParameter("source f0 must be positive"));
        }
        if !self.amplitude.is_finite() || !self.t0.is_finite() {
            return Err(Error::NonFinite("source"));
        }
        Ok(())
    }

    pub fn spatial(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        math::exp(-(dx * dx + dy * dy) / (2.0 * self.spatial_width * self.spatial_width))
    }
}

/// `amplitude · (1 − 2π²f0²(t−t0)²) · exp(−π²f0²(t−t0)²)`
pub fn ricker(t: f64, spec: &SourceSpec) -> f64 {
    let s = PI * spec.f0 * (t - spec.t0);
    let s2 = s * s;
    spec.amplitude * (1.0 - 2.0 * s2) * math::exp(-s2)
}

/// Initial position or velocity.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    Constant(f64),
    Gaussian {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
    /// Values of a CG1 function at the mesh nodes.
    Nodal(Vec<f64>),
}

impl InitialData {
    fn load(&self, mesh: &MeshCG1, mass: &SparseMatrix) -> Result<Option<Vec<f64>>> {
        Ok(match self {
            InitialData::Zero => None,
            InitialData::Constant(c) => {
                let c = *c;
                Some(fem::load_vector(mesh, |_, _| c))
            }
            InitialData::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let (a, c, w) = (*amplitude, *center, *width);
                Some(fem::load_vector(mesh, |x, y| {
                    let (dx, dy) = (x - c[0], y - c[1]);
                    let r2 = dx * dx + dy * dy;
                    a * math::exp(-r2 / (2.0 * w * w))
                }))
            }
            InitialData::Nodal(v) => {
                check_len(mesh.n_nodes(), v.len())?;
                Some(mass.mul_vec(v))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveConfig {
    /// Reference speed of sound squared; `a(w) = c_sq (1 + w)`.
    pub c_sq: f64,
    /// Sound diffusivity.
    pub b: f64,
    /// Stabilization parameter of the time discretization.
    pub sigma: f64,
    pub t_final: f64,
    pub n_steps: usize,
    pub source: SourceSpec,
    pub u0: InitialData,
    pub u1: InitialData,
}

impl WaveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_sq > 0.0) {
            return Err(Error::InvalidParameter("c_sq must be positive"));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidParameter("sound diffusivity b must be positive"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be positive"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter("final time T must be positive"));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidParameter("n_steps must be at least 2"));
        }
        self.source.validate()
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }
}

/// Nodal frames `u^0..u^N` on the uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    pub frames: Vec<Vec<f64>>,
    pub tau: f64,
}

impl StateTrajectory {
    pub fn zeros(n_frames: usize, n_nodes: usize, tau: f64) -> Self {
        StateTrajectory {
            frames: vec![vec![0.0; n_nodes]; n_frames],
            tau,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.frames.len().saturating_sub(1)
    }

    pub fn is_finite(&self) -> bool {
        self.frames.iter().flatten().all(|v| v.is_finite())
    }
}

/// Trapezoidal weights `τ/2, τ, …, τ, τ/2` for `n_steps + 1` frames.
pub fn trapezoid_weights(n_steps: usize, tau: f64) -> Vec<f64> {
    let mut w = vec![tau; n_steps + 1];
    w[0] = 0.5 * tau;
    w[n_steps] = 0.5 * tau;
    w
}

/// The step matrices for one control.
#[derive(Debug, Clone)]
pub struct StepOperators {
    /// `K_{a(w)}`
    pub stiffness: SparseMatrix,
    pub c_plus: SparseMatrix,
    pub c_zero: SparseMatrix,
    pub c_minus: SparseMatrix,
    /// Right-hand side operator acting on `u⁰` in the first step.
    pub first_rhs: SparseMatrix,
}

/// Mesh-dependent data shared by every forward and adjoint solve.
#[derive(Debug, Clone)]
pub struct WaveSolver<'m> {
    pub mesh: &'m MeshCG1,
    pub cfg: WaveConfig,
    pub opts: SolverOptions,
    pub mass: SparseMatrix,
    pub laplacian: SparseMatrix,
    pub lumped: Vec<f64>,
    /// `P₀u₀`
    pub initial_state: Vec<f64>,
    /// `(u₁, φ) + F₀`
    pub first_load: Vec<f64>,
    /// `F_i` for `1 ≤ i ≤ N−1` (index 0 unused and empty).
    pub loads: Vec<Vec<f64>>,
}

impl<'m> WaveSolver<'m> {
    pub fn new(mesh: &'m MeshCG1, cfg: WaveConfig, opts: SolverOptions) -> Result<Self> {
        cfg.validate()?;
        opts.validate()?;
        let mass = fem::assemble_mass(mesh);
        let laplacian = fem::assemble_laplacian(mesh);
        let lumped = fem::lumped_mass(mesh);
        let n = mesh.n_nodes();
        let zero = vec![0.0; n];

        let initial_state = match cfg.u0.load(mesh, &mass)? {
            None => zero.clone(),
            Some(rhs) => cg_solve(&mass, &rhs, &zero, &opts)?,
        };

        let src = cfg.source;
        let spatial = fem::load_vector(mesh, |x, y| src.spatial(x, y));
        let tau = cfg.tau();
        let steps = cfg.n_steps;
        let mut first_load = cfg.u1.load(mesh, &mass)?.unwrap_or_else(|| zero.clone());
        math::axpy(hat_integral(&src, 0, steps, tau), &spatial, &mut first_load);
        let mut loads = Vec::with_capacity(steps);
        loads.push(Vec::new());
        for i in 1..steps {
            let c = hat_integral(&src, i, steps, tau);
            loads.push(spatial.iter().map(|s| c * s).collect());
        }

        Ok(WaveSolver {
            mesh,
            cfg,
            opts,
            mass,
            laplacian,
            lumped,
            initial_state,
            first_load,
            loads,
        })
    }

    pub fn tau(&self) -> f64 {
        self.cfg.tau()
    }

    pub fn n_steps(&self) -> usize {
        self.cfg.n_steps
    }

    pub fn operators(&self, w: &[f64]) -> Result<StepOperators> {
        let coeff = fem::speed_coefficients(self.mesh, w, self.cfg.c_sq)?;
        let stiffness = fem::assemble_stiffness(self.mesh, &coeff)?;
        let tau = self.tau();
        let (sigma, b) = (self.cfg.sigma, self.cfg.b);
        let (m, k1, a) = (&self.mass, &self.laplacian, &stiffness);
        let c_plus = SparseMatrix::combine(&[(1.0 / tau, m), (tau * sigma, a), (0.5 * b, k1)])?;
        let c_zero = SparseMatrix::combine(&[(-2.0 / tau, m), (tau * (1.0 - 2.0 * sigma), a)])?;
        let c_minus = SparseMatrix::combine(&[(1.0 / tau, m), (tau * sigma, a), (-0.5 * b, k1)])?;
        let first_rhs = SparseMatrix::combine(&[(1.0 / tau, m), (-tau * (0.5 - sigma), a), (0.5 * b, k1)])?;
        Ok(StepOperators {
            stiffness,
            c_plus,
            c_zero,
            c_minus,
            first_rhs,
        })
    }

    pub fn solve_forward(&self, w: &[f64]) -> Result<StateTrajectory> {
        self.forward_with_loads(w, &self.initial_state, &self.first_load, &self.loads)
    }

    /// Forward march with explicit data: `u⁰`, the first-step load and
    /// `loads[i]` for `1 ≤ i ≤ N−1` (`loads[0]` is ignored).
    pub fn forward_with_loads(
        &self,
        w: &[f64],
        u0: &[f64],
        first_load: &[f64],
        loads: &[Vec<f64>],
    ) -> Result<StateTrajectory> {
        let n = self.mesh.n_nodes();
        let steps = self.n_steps();
        check_len(n, w.len())?;
        check_len(n, u0.len())?;
        check_len(n, first_load.len())?;
        check_len(steps, loads.len())?;
        let ops = self.operators(w)?;

        let mut frames: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
        frames.push(u0.to_vec());
        let mut rhs = ops.first_rhs.mul_vec(u0);
        math::axpy(1.0, first_load, &mut rhs);
        let u1 = cg_solve(&ops.c_plus, &rhs, u0, &self.opts)?;
        check_blowup(&u1, 1)?;
        frames.push(u1);

        let mut tmp = vec![0.0; n];
        for i in 1..steps {
            let (cur, prev) = (&frames[i], &frames[i - 1]);
            check_len(n, loads[i].len())?;
            ops.c_zero.mul_vec_into(cur, &mut rhs);
            ops.c_minus.mul_vec_into(prev, &mut tmp);
            for k in 0..n {
                rhs[k] = loads[i][k] - rhs[k] - tmp[k];
                tmp[k] = 2.0 * cur[k] - prev[k];
            }
            let next = cg_solve(&ops.c_plus, &rhs, &tmp, &self.opts)?;
            check_blowup(&next, i + 1)?;
            frames.push(next);
        }
        Ok(StateTrajectory {
            frames,
            tau: self.tau(),
        })
    }

    /// Adjoint of the tracking functional for a (masked) residual `u − u_d`.
    /// The right-hand side of the equation for frame `m` is the
    /// trapezoid-weighted lumped mass applied to `residual.frames[m]`.
    pub fn solve_adjoint(&self, w: &[f64], residual: &StateTrajectory) -> Result<StateTrajectory> {
        let steps = self.n_steps();
        check_len(steps + 1, residual.frames.len())?;
        let theta = trapezoid_weights(steps, self.tau());
        let sources: Vec<Vec<f64>> = residual
            .frames
            .iter()
            .zip(&theta)
            .map(|(r, &th)| r.iter().zip(&self.lumped).map(|(ri, di)| th * di * ri).collect())
            .collect();
        self.adjoint_with_loads(w, &sources)
    }

    /// Backward march: solves `Lᵀ p = g` for the forward operator `L`, where
    /// `sources[m]` is the derivative of the objective with respect to frame
    /// `m` (`sources[0]` is ignored since `u⁰` does not depend on `w`).
    /// Returns frames `p^0..p^N` with `p^N = 0`.
    pub fn adjoint_with_loads(&self, w: &[f64], sources: &[Vec<f64>]) -> Result<StateTrajectory> {
        let n = self.mesh.n_nodes();
        let steps = self.n_steps();
        check_len(n, w.len())?;
        check_len(steps + 1, sources.len())?;
        let ops = self.operators(w)?;

        let mut frames = vec![vec![0.0; n]; steps + 1];
        check_len(n, sources[steps].len())?;
        frames[steps - 1] = cg_solve(&ops.c_plus, &sources[steps], &frames[steps], &self.opts)?;
        check_blowup(&frames[steps - 1], steps - 1)?;

        let mut rhs = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for m in (1..steps).rev() {
            check_len(n, sources[m].len())?;
            ops.c_zero.mul_vec_into(&frames[m], &mut rhs);
            ops.c_minus.mul_vec_into(&frames[m + 1], &mut tmp);
            for k in 0..n {
                rhs[k] = sources[m][k] - rhs[k] - tmp[k];
                tmp[k] = 2.0 * frames[m][k] - frames[m + 1][k];
            }
            let prev = cg_solve(&ops.c_plus, &rhs, &tmp, &self.opts)?;
            check_blowup(&prev, m - 1)?;
            frames[m - 1] = prev;
        }
        Ok(StateTrajectory {
            frames,
            tau: self.tau(),
        })
    }

    /// Derivative of the reduced objective with respect to the nodal control
    /// values, `∂j/∂w_k = −(c²/3) Σ_{T∋k} Σ_r |T| ∇p^r·∇v^r`, where `v^r` is
    /// the σ-weighted combination of state frames multiplying `A` in step
    /// `r`. This is the exact derivative of the discrete objective.
    pub fn control_derivative(&self, forward: &StateTrajectory, adjoint: &StateTrajectory) -> Result<Vec<f64>> {
        let mesh = self.mesh;
        let n = mesh.n_nodes();
        let steps = self.n_steps();
        check_len(steps + 1, forward.frames.len())?;
        check_len(steps + 1, adjoint.frames.len())?;
        let tau = self.tau();
        let sigma = self.cfg.sigma;

        let mut per_triangle = vec![0.0; mesh.n_triangles()];
        let mut v = vec![0.0; n];
        for r in 0..steps {
            let u = &forward.frames;
            if r == 0 {
                for k in 0..n {
                    v[k] = tau * (sigma * u[1][k] + (0.5 - sigma) * u[0][k]);
                }
            } else {
                for k in 0..n {
                    v[k] = tau * (sigma * u[r + 1][k] + (1.0 - 2.0 * sigma) * u[r][k] + sigma * u[r - 1][k]);
                }
            }
            let p = &adjoint.frames[r];
            for (t, acc) in per_triangle.iter_mut().enumerate() {
                let gp = mesh.gradient_on(t, p);
                let gv = mesh.gradient_on(t, &v);
                *acc += mesh.area(t) * (gp[0] * gv[0] + gp[1] * gv[1]);
            }
        }

        let scale = -self.cfg.c_sq / 3.0;
        let mut out = vec![0.0; n];
        for (tri, s) in mesh.triangles.iter().zip(&per_triangle) {
            for &k in tri {
                out[k] += scale * s;
            }
        }
        Ok(out)
    }

    /// `‖(u^{i+1} − u^i)/τ‖²_M + (u^i)ᵀ K_{a(w)} u^i` for `0 ≤ i < N`.
    pub fn discrete_energy(&self, w: &[f64], traj: &StateTrajectory) -> Result<Vec<f64>> {
        let coeff = fem::speed_coefficients(self.mesh, w, self.cfg.c_sq)?;
        let a = fem::assemble_stiffness(self.mesh, &coeff)?;
        let tau = self.tau();
        Ok(traj
            .frames
            .windows(2)
            .map(|pair| {
                let vel: Vec<f64> = pair[1].iter().zip(&pair[0]).map(|(x, y)| (x - y) / tau).collect();
                self.mass.bilinear(&vel, &vel) + a.bilinear(&pair[0], &pair[0])
            })
            .collect())
    }
}

/// `∫ r(t) e_i(t) dt` over the support of the hat function `e_i`, by
/// two-point Gauss quadrature on each subinterval.
fn hat_integral(src: &SourceSpec, i: usize, steps: usize, tau: f64) -> f64 {
    const G: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)
    let ti = i as f64 * tau;
    let mut acc = 0.0;
    let mut interval = |a: f64, b: f64, hat: &dyn Fn(f64) -> f64| {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for s in [-G, G] {
            let t = mid + half * s;
            acc += half * ricker(t, src) * hat(t);
        }
    };
    if i > 0 {
        interval(ti - tau, ti, &|t| (t - (ti - tau)) / tau);
    }
    if i < steps {
        interval(ti, ti + tau, &|t| (ti + tau - t) / tau);
    }
    acc
}

fn check_blowup(frame: &[f64], step: usize) -> Result<()> {
    let norm = math::norm2(frame);
    if !(norm <= BLOWUP_NORM) {
        return Err(Error::Blowup { step, norm });
    }
    Ok(())
}

/// Forward solve for one control; builds the solver data on the fly.
pub fn solve_forward(mesh: &MeshCG1, w: &[f64], cfg: &WaveConfig, opts: &SolverOptions) -> Result<StateTrajectory> {
    WaveSolver::new(mesh, cfg.clone(), *opts)?.solve_forward(w)
}

/// Adjoint solve for one control and a (masked) residual trajectory.
pub fn solve_adjoint(
    mesh: &MeshCG1,
    w: &[f64],
    cfg: &WaveConfig,
    residual: &StateTrajectory,
    opts: &SolverOptions,
) -> Result<StateTrajectory> {
    WaveSolver::new(mesh, cfg.clone(), *opts)?.solve_adjoint(w, residual)
}
