//! Structured triangulations of axis-aligned rectangles.
//!
//! Nodes are numbered row-major (`index = j * (nx + 1) + i` for column `i`
//! and row `j`). Every cell is split along its lower-left to upper-right
//! diagonal, giving the two counter-clockwise triangles
//! `(ll, lr, ur)` and `(ll, ur, ul)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Axis-aligned rectangle `(x_min, x_max) × (y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect::new(0.0, 1.0, 0.0, 1.0);

    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

#[derive(Debug, Clone)]
pub struct MeshCG1 {
    pub bounds: Rect,
    pub nx: usize,
    pub ny: usize,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_nodes: Vec<usize>,
    is_boundary: Vec<bool>,
    areas: Vec<f64>,
    /// Constant gradients of the three local hat functions per triangle.
    grads: Vec<[[f64; 2]; 3]>,
}

impl MeshCG1 {
    pub fn build(bounds: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh("cell counts must be at least 1"));
        }
        let finite = [bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || bounds.x_max <= bounds.x_min || bounds.y_max <= bounds.y_min {
            return Err(Error::InvalidMesh("bounds must satisfy max > min"));
        }

        let hx = (bounds.x_max - bounds.x_min) / nx as f64;
        let hy = (bounds.y_max - bounds.y_min) / ny as f64;
        let stride = nx + 1;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut is_boundary = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            // Pin the last row/column to the exact bound.
            let y = if j == ny {
                bounds.y_max
            } else {
                bounds.y_min + j as f64 * hy
            };
            for i in 0..=nx {
                let x = if i == nx {
                    bounds.x_max
                } else {
                    bounds.x_min + i as f64 * hx
                };
                nodes.push([x, y]);
                is_boundary.push(i == 0 || j == 0 || i == nx || j == ny);
            }
        }
        let boundary_nodes = is_boundary
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
            .collect();

        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let ll = j * stride + i;
                let lr = ll + 1;
                let ul = ll + stride;
                let ur = ul + 1;
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }

        let mut areas = Vec::with_capacity(triangles.len());
        let mut grads = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let [p0, p1, p2] = tri.map(|k| nodes[k]);
            let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            areas.push(0.5 * det);
            // grad(lambda_k) = rot90(opposite edge) / det
            let g = |a: [f64; 2], b: [f64; 2]| [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
            grads.push([g(p1, p2), g(p2, p0), g(p0, p1)]);
        }

        Ok(MeshCG1 {
            bounds,
            nx,
            ny,
            nodes,
            triangles,
            boundary_nodes,
            is_boundary,
            areas,
            grads,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Signed area of triangle `t` (positive for every triangle built here).
    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn grads(&self, t: usize) -> &[[f64; 2]; 3] {
        &self.grads[t]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.is_boundary[node]
    }

    pub fn domain_area(&self) -> f64 {
        self.bounds.area()
    }

    pub fn hx(&self) -> f64 {
        (self.bounds.x_max - self.bounds.x_min) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.bounds.y_max - self.bounds.y_min) / self.ny as f64
    }

    /// Gradient of the CG1 interpolant of `values` on triangle `t`.
    pub fn gradient_on(&self, t: usize, values: &[f64]) -> [f64; 2] {
        let tri = &self.triangles[t];
        let g = &self.grads[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            let v = values[tri[k]];
            out[0] += v * g[k][0];
            out[1] += v * g[k][1];
        }
        out
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&[x, y]| f(x, y)).collect()
    }

    /// Value of the CG1 interpolant of `values` at `(x, y)`; points outside
    /// the rectangle are clamped to it.
    pub fn evaluate(&self, values: &[f64], x: f64, y: f64) -> f64 {
        let b = &self.bounds;
        let sx = ((x - b.x_min) / self.hx()).clamp(0.0, self.nx as f64);
        let sy = ((y - b.y_min) / self.hy()).clamp(0.0, self.ny as f64);
        let i = (sx as usize).min(self.nx - 1);
        let j = (sy as usize).min(self.ny - 1);
        let (s, t) = (sx - i as f64, sy - j as f64);
        let stride = self.nx + 1;
        let ll = values[j * stride + i];
        let lr = values[j * stride + i + 1];
        let ul = values[(j + 1) * stride + i];
        let ur = values[(j + 1) * stride + i + 1];
        if t <= s {
            ll + s * (lr - ll) + t * (ur - lr)
        } else {
            ll + t * (ul - ll) + s * (ur - ul)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_counts() {
        let m = MeshCG1::build(Rect::new(-1.0, 1.0, -1.0, 2.0), 96, 96).unwrap();
        assert_eq!(m.n_nodes(), 9409);
        assert_eq!(m.n_triangles(), 18432);
    }

    #[test]
    fn small_counts() {
        let m = MeshCG1::build(Rect::UNIT, 1, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_triangles()), (4, 2));
        let m = MeshCG1::build(Rect::UNIT, 2, 3).unwrap();
        assert_eq!((m.n_nodes(), m.n_triangles()), (12, 12));
        assert_eq!(m.boundary_nodes.len(), 10);
    }

    #[test]
    fn positive_areas_sum_to_domain() {
        let r = Rect::new(-1.0, 1.0, -1.0, 2.0);
        let m = MeshCG1::build(r, 7, 11).unwrap();
        let total: f64 = (0..m.n_triangles()).map(|t| m.area(t)).sum();
        assert!((0..m.n_triangles()).all(|t| m.area(t) > 0.0));
        assert!((total - r.area()).abs() <= 1e-12 * r.area());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MeshCG1::build(Rect::UNIT, 0, 3).is_err());
        assert!(MeshCG1::build(Rect::new(1.0, 1.0, 0.0, 1.0), 2, 2).is_err());
        assert!(MeshCG1::build(Rect::new(0.0, 1.0, 2.0, 1.0), 2, 2).is_err());
        assert!(MeshCG1::build(Rect::new(0.0, f64::NAN, 0.0, 1.0), 2, 2).is_err());
    }

    #[test]
    fn affine_gradient_is_exact() {
        let m = MeshCG1::build(Rect::new(-1.0, 1.0, 0.0, 2.0), 5, 4).unwrap();
        let v = m.interpolate(|x, y| 3.0 * x - 2.0 * y + 1.0);
        for t in 0..m.n_triangles() {
            let g = m.gradient_on(t, &v);
            assert!((g[0] - 3.0).abs() < 1e-12 && (g[1] + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation_reproduces_nested_interpolant() {
        let coarse = MeshCG1::build(Rect::new(-1.0, 1.0, 0.0, 2.0), 3, 4).unwrap();
        let fine = MeshCG1::build(Rect::new(-1.0, 1.0, 0.0, 2.0), 6, 8).unwrap();
        let f = |x: f64, y: f64| 2.0 * x - y + 0.5 * x * y;
        let v = coarse.interpolate(f);
        for &[x, y] in &coarse.nodes {
            assert!((coarse.evaluate(&v, x, y) - f(x, y)).abs() < 1e-12);
        }
        // Affine data is reproduced everywhere.
        let a = coarse.interpolate(|x, y| 3.0 * x + y);
        for &[x, y] in &fine.nodes {
            assert!((coarse.evaluate(&a, x, y) - (3.0 * x + y)).abs() < 1e-12);
        }
    }
}
