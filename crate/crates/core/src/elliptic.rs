//! Source control of `−νΔu = Bw + f` with homogeneous Dirichlet data.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::fem;
use crate::linsolve::{cg_solve, SolverOptions};
use crate::math;
use crate::mesh::MeshCG1;
use crate::sparse::SparseMatrix;

/// How the control enters the source term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlOperator {
    Identity,
    /// Row-normalized discrete Gaussian convolution of nodal values with
    /// standard deviation `radius`, truncated at three radii.
    Mollifier {
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticConfig {
    pub nu: f64,
    /// Fixed nodal source `f`; `None` means zero.
    pub source: Option<Vec<f64>>,
    pub operator: ControlOperator,
}

impl EllipticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::InvalidParameter("nu must be positive"));
        }
        if let ControlOperator::Mollifier { radius } = self.operator {
            if !(radius > 0.0) {
                return Err(Error::InvalidParameter("mollifier radius must be positive"));
            }
        }
        if let Some(f) = &self.source {
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("elliptic source"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EllipticSolver<'m> {
    pub mesh: &'m MeshCG1,
    pub cfg: EllipticConfig,
    pub opts: SolverOptions,
    pub mass: SparseMatrix,
    pub lumped: Vec<f64>,
    /// `νK₁` with boundary rows and columns eliminated.
    pub system: SparseMatrix,
    mollifier: Option<SparseMatrix>,
    fixed: Vec<bool>,
}

impl<'m> EllipticSolver<'m> {
    pub fn new(mesh: &'m MeshCG1, cfg: EllipticConfig, opts: SolverOptions) -> Result<Self> {
        cfg.validate()?;
        opts.validate()?;
        if let Some(f) = &cfg.source {
            check_len(mesh.n_nodes(), f.len())?;
        }
        let mass = fem::assemble_mass(mesh);
        let lumped = fem::lumped_mass(mesh);
        let mut system = fem::assemble_laplacian(mesh);
        system.scale(cfg.nu);
        let fixed: Vec<bool> = (0..mesh.n_nodes()).map(|k| mesh.is_boundary(k)).collect();
        system.eliminate_symmetric(&fixed)?;
        let mollifier = match cfg.operator {
            ControlOperator::Identity => None,
            ControlOperator::Mollifier { radius } => Some(mollifier_matrix(mesh, radius)),
        };
        Ok(EllipticSolver {
            mesh,
            cfg,
            opts,
            mass,
            lumped,
            system,
            mollifier,
            fixed,
        })
    }

    pub fn apply_control_operator(&self, w: &[f64]) -> Vec<f64> {
        match &self.mollifier {
            None => w.to_vec(),
            Some(b) => b.mul_vec(w),
        }
    }

    /// `Bᵀ v` (plain matrix transpose).
    pub fn apply_control_transpose(&self, v: &[f64]) -> Vec<f64> {
        match &self.mollifier {
            None => v.to_vec(),
            Some(b) => {
                let mut out = vec![0.0; v.len()];
                for (r, vr) in v.iter().enumerate().take(b.n_rows) {
                    for (c, val) in b.row(r) {
                        out[c] += val * vr;
                    }
                }
                out
            }
        }
    }

    /// Solves `νK₁u = M g` on interior nodes with `u = 0` on the boundary.
    fn solve_dirichlet(&self, g: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = self.mass.mul_vec(g);
        for (r, &fixed) in rhs.iter_mut().zip(&self.fixed) {
            if fixed {
                *r = 0.0;
            }
        }
        let zero = vec![0.0; rhs.len()];
        cg_solve(&self.system, &rhs, &zero, &self.opts)
    }

    pub fn solve(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len(self.mesh.n_nodes(), w.len())?;
        let mut g = self.apply_control_operator(w);
        if let Some(f) = &self.cfg.source {
            math::axpy(1.0, f, &mut g);
        }
        self.solve_dirichlet(&g)
    }

    /// Solves `νK₁p = M r` with zero Dirichlet data, so that
    /// `⟨S(w) − S(0), r⟩_M = ⟨Bw, p⟩_M`.
    pub fn solve_adjoint(&self, residual: &[f64]) -> Result<Vec<f64>> {
        check_len(self.mesh.n_nodes(), residual.len())?;
        self.solve_dirichlet(residual)
    }

    /// Derivative of `½‖S(w) − u_d‖²_M` with respect to the nodal control
    /// values, `BᵀM p`, given the adjoint state `p`.
    pub fn control_derivative(&self, adjoint: &[f64]) -> Vec<f64> {
        self.apply_control_transpose(&self.mass.mul_vec(adjoint))
    }
}

fn mollifier_matrix(mesh: &MeshCG1, radius: f64) -> SparseMatrix {
    let n = mesh.n_nodes();
    let cutoff = 3.0 * radius;
    let reach_x = (cutoff / mesh.hx()) as usize + 1;
    let reach_y = (cutoff / mesh.hy()) as usize + 1;
    let stride = mesh.nx + 1;
    let mut trip = Vec::new();
    for r in 0..n {
        let (ri, rj) = (r % stride, r / stride);
        let p = mesh.nodes[r];
        let mut row = Vec::new();
        let mut total = 0.0;
        for j in rj.saturating_sub(reach_y)..=(rj + reach_y).min(mesh.ny) {
            for i in ri.saturating_sub(reach_x)..=(ri + reach_x).min(mesh.nx) {
                let c = j * stride + i;
                let q = mesh.nodes[c];
                let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
                let d2 = dx * dx + dy * dy;
                if d2 <= cutoff * cutoff {
                    let v = math::exp(-d2 / (2.0 * radius * radius));
                    total += v;
                    row.push((c, v));
                }
            }
        }
        trip.extend(row.into_iter().map(|(c, v)| (r, c, v / total)));
    }
    SparseMatrix::from_triplets(n, n, trip)
}

pub fn solve_elliptic(mesh: &MeshCG1, w: &[f64], cfg: &EllipticConfig, opts: &SolverOptions) -> Result<Vec<f64>> {
    EllipticSolver::new(mesh, cfg.clone(), *opts)?.solve(w)
}

pub fn solve_elliptic_adjoint(
    mesh: &MeshCG1,
    residual: &[f64],
    cfg: &EllipticConfig,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    EllipticSolver::new(mesh, cfg.clone(), *opts)?.solve_adjoint(residual)
}
