//! Reduced objectives `j(w) = J(S(w))` consumed by the homotopy driver.

use alloc::vec::Vec;

use crate::elliptic::EllipticSolver;
use crate::error::{check_len, Result};
use crate::fem;
use crate::math;
use crate::mesh::MeshCG1;
use crate::objective::{reduced_gradient_wave, tracking_objective, tracking_residual, Target};
use crate::sparse::SparseMatrix;
use crate::wave::{StateTrajectory, WaveSolver};

/// A smooth objective of a nodal control together with the discrete
/// geometry the trust-region machinery needs.
pub trait ReducedObjective {
    /// Lumped mass weights; they define the L¹/L² metrics on controls.
    fn lumped(&self) -> &[f64];

    /// Unit-coefficient stiffness, used by the Ginzburg–Landau energy.
    fn laplacian(&self) -> &SparseMatrix;

    fn n(&self) -> usize {
        self.lumped().len()
    }

    fn value(&self, w: &[f64]) -> Result<f64>;

    /// Value and lumped-L² Riesz representative of the derivative.
    fn value_and_gradient(&self, w: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// `½ ∫₀ᵀ ∫_D (u − u_d)²` subject to the damped wave equation.
#[derive(Debug, Clone)]
pub struct WaveTracking<'m> {
    pub solver: WaveSolver<'m>,
    pub target: Target,
    pub focal_mask: Vec<f64>,
}

impl<'m> WaveTracking<'m> {
    pub fn new(solver: WaveSolver<'m>, target: Target, focal_mask: Vec<f64>) -> Result<Self> {
        check_len(solver.mesh.n_nodes(), focal_mask.len())?;
        Ok(WaveTracking {
            solver,
            target,
            focal_mask,
        })
    }

    pub fn forward(&self, w: &[f64]) -> Result<StateTrajectory> {
        self.solver.solve_forward(w)
    }
}

impl ReducedObjective for WaveTracking<'_> {
    fn lumped(&self) -> &[f64] {
        &self.solver.lumped
    }

    fn laplacian(&self) -> &SparseMatrix {
        &self.solver.laplacian
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        let u = self.solver.solve_forward(w)?;
        tracking_objective(&u, &self.target, &self.focal_mask, &self.solver.lumped)
    }

    fn value_and_gradient(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        let u = self.solver.solve_forward(w)?;
        let j = tracking_objective(&u, &self.target, &self.focal_mask, &self.solver.lumped)?;
        let residual = tracking_residual(&u, &self.target, &self.focal_mask)?;
        let p = self.solver.solve_adjoint(w, &residual)?;
        Ok((j, reduced_gradient_wave(&self.solver, &u, &p)?))
    }
}

/// `½‖S(w) − u_d‖²_M` subject to the elliptic source problem.
#[derive(Debug, Clone)]
pub struct EllipticTracking<'m> {
    pub solver: EllipticSolver<'m>,
    pub target: Vec<f64>,
    laplacian: SparseMatrix,
}

impl<'m> EllipticTracking<'m> {
    pub fn new(solver: EllipticSolver<'m>, target: Vec<f64>) -> Result<Self> {
        check_len(solver.mesh.n_nodes(), target.len())?;
        let laplacian = fem::assemble_laplacian(solver.mesh);
        Ok(EllipticTracking {
            solver,
            target,
            laplacian,
        })
    }

    fn misfit(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        let u = self.solver.solve(w)?;
        let r: Vec<f64> = u.iter().zip(&self.target).map(|(a, b)| a - b).collect();
        Ok((0.5 * self.solver.mass.bilinear(&r, &r), r))
    }
}

impl ReducedObjective for EllipticTracking<'_> {
    fn lumped(&self) -> &[f64] {
        &self.solver.lumped
    }

    fn laplacian(&self) -> &SparseMatrix {
        &self.laplacian
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        Ok(self.misfit(w)?.0)
    }

    fn value_and_gradient(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (j, r) = self.misfit(w)?;
        let p = self.solver.solve_adjoint(&r)?;
        let mut g = self.solver.control_derivative(&p);
        for (gi, d) in g.iter_mut().zip(&self.solver.lumped) {
            *gi /= d;
        }
        Ok((j, g))
    }
}

/// `½ Σ d_i (w_i − c_i)²`; a PDE-free objective for exercising the driver.
#[derive(Debug, Clone)]
pub struct LumpedQuadratic {
    pub center: Vec<f64>,
    lumped: Vec<f64>,
    laplacian: SparseMatrix,
}

impl LumpedQuadratic {
    pub fn new(mesh: &MeshCG1, center: Vec<f64>) -> Result<Self> {
        check_len(mesh.n_nodes(), center.len())?;
        Ok(LumpedQuadratic {
            center,
            lumped: fem::lumped_mass(mesh),
            laplacian: fem::assemble_laplacian(mesh),
        })
    }
}

impl ReducedObjective for LumpedQuadratic {
    fn lumped(&self) -> &[f64] {
        &self.lumped
    }

    fn laplacian(&self) -> &SparseMatrix {
        &self.laplacian
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        check_len(self.lumped.len(), w.len())?;
        let r: Vec<f64> = w.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        Ok(0.5 * math::weighted_dot(&self.lumped, &r, &r))
    }

    fn value_and_gradient(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        let j = self.value(w)?;
        Ok((j, w.iter().zip(&self.center).map(|(a, b)| a - b).collect()))
    }
}
