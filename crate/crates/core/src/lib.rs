//! Homotopy trust-region optimization of binary-valued controls with a
//! Ginzburg–Landau relaxation of the perimeter regularizer.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only the numerics:
//!
//! * [`mesh`], [`sparse`], [`fem`] – structured CG1 triangulations, CSR
//!   matrices and the mass/stiffness assembly built on them.
//! * [`linsolve`] – Jacobi-preconditioned conjugate gradients.
//! * [`wave`] and [`elliptic`] – forward/adjoint solvers for the two model
//!   applications (a strongly damped wave equation whose speed of sound is
//!   controlled, and an elliptic source control problem).
//! * [`objective`] – the Ginzburg–Landau energy, tracking functionals,
//!   reduced gradients and interface diagnostics.
//! * [`subproblem`] – convex and nonconvex trust-region subproblem solvers.
//! * [`homotopy`] – the outer trust-region loop that drives the interface
//!   width ε to zero.
//! * [`problem`] – ready-made reduced objectives for both applications.
//!
//! File formats, configuration and the command line live in the `gltr`
//! companion crate.
#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod elliptic;
pub mod error;
pub mod fem;
pub mod homotopy;
pub mod linsolve;
pub mod mesh;
pub mod objective;
pub mod problem;
pub mod sparse;
pub mod subproblem;
pub mod wave;

mod field;
mod math;

pub use error::{Error, Result};
pub use field::ControlField;
pub use mesh::{MeshCG1, Rect};
pub use sparse::SparseMatrix;
