//! Jacobi-preconditioned conjugate gradients for SPD systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::math::{self, axpy, dot, norm2};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target `‖Ax − b‖₂ ≤ tol ‖b‖₂`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("solver tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("solver max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖Ax − b‖₂ / ‖b‖₂`.
    pub residual: f64,
}

pub fn cg_solve(a: &SparseMatrix, b: &[f64], x0: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    pcg(a, b, x0, opts).map(|s| s.x)
}

pub fn pcg(a: &SparseMatrix, b: &[f64], x0: &[f64], opts: &SolverOptions) -> Result<CgSolution> {
    pcg_monitored(a, b, x0, opts, |_, _, _| {})
}

/// [`pcg`] calling `monitor(iteration, x, ‖r‖_{D⁻¹})` after every update.
pub fn pcg_monitored(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    opts: &SolverOptions,
    mut monitor: impl FnMut(usize, &[f64], f64),
) -> Result<CgSolution> {
    opts.validate()?;
    check_len(a.n_rows, a.n_cols)?;
    check_len(a.n_rows, b.len())?;
    check_len(a.n_rows, x0.len())?;

    let n = b.len();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = x0.to_vec();
    let mut r = a.mul_vec(&x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let target = opts.tol * b_norm;
    let mut r_norm = norm2(&r);
    if r_norm <= target {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual: r_norm / b_norm,
        });
    }

    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=opts.max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotConverged {
                iterations: it,
                residual: r_norm / b_norm,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        r_norm = norm2(&r);
        for ((zi, ri), di) in z.iter_mut().zip(&r).zip(&inv_diag) {
            *zi = ri * di;
        }
        let rz_new = dot(&r, &z);
        monitor(it, &x, math::sqrt(rz_new.max(0.0)));
        if r_norm <= target {
            return Ok(CgSolution {
                x,
                iterations: it,
                residual: r_norm / b_norm,
            });
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: r_norm / b_norm,
    })
}
