//! CG1 operator assembly, discrete norms and quadrature helpers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::math;
use crate::mesh::MeshCG1;
use crate::sparse::SparseMatrix;

/// Consistent mass matrix `M_ij = ∫ φ_i φ_j`.
pub fn assemble_mass(mesh: &MeshCG1) -> SparseMatrix {
    let mut trip = Vec::with_capacity(9 * mesh.n_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let a = mesh.area(t);
        for (i, &ni) in tri.iter().enumerate() {
            for (j, &nj) in tri.iter().enumerate() {
                let v = if i == j { a / 6.0 } else { a / 12.0 };
                trip.push((ni, nj, v));
            }
        }
    }
    SparseMatrix::from_triplets(mesh.n_nodes(), mesh.n_nodes(), trip)
}

/// Stiffness matrix `K_ij = Σ_T coeff_T ∫_T ∇φ_i·∇φ_j` with one coefficient
/// per triangle.
pub fn assemble_stiffness(mesh: &MeshCG1, coeff: &[f64]) -> Result<SparseMatrix> {
    check_len(mesh.n_triangles(), coeff.len())?;
    if coeff.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("stiffness coefficient"));
    }
    let mut trip = Vec::with_capacity(9 * mesh.n_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let scale = coeff[t] * mesh.area(t);
        let g = mesh.grads(t);
        for i in 0..3 {
            for j in 0..3 {
                let v = scale * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                trip.push((tri[i], tri[j], v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(mesh.n_nodes(), mesh.n_nodes(), trip))
}

/// Stiffness matrix with unit coefficient.
pub fn assemble_laplacian(mesh: &MeshCG1) -> SparseMatrix {
    assemble_stiffness(mesh, &vec![1.0; mesh.n_triangles()]).expect("unit coefficients are finite")
}

/// Row sums of the consistent mass matrix. Each node receives a third of the
/// area of every adjacent triangle.
pub fn lumped_mass(mesh: &MeshCG1) -> Vec<f64> {
    let mut d = vec![0.0; mesh.n_nodes()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let third = mesh.area(t) / 3.0;
        for &n in tri {
            d[n] += third;
        }
    }
    d
}

/// Per-triangle values of `a(w) = c_sq (1 + w)`, evaluated at the vertices
/// and averaged.
pub fn speed_coefficients(mesh: &MeshCG1, w: &[f64], c_sq: f64) -> Result<Vec<f64>> {
    check_len(mesh.n_nodes(), w.len())?;
    Ok(mesh
        .triangles
        .iter()
        .map(|tri| c_sq * (1.0 + (w[tri[0]] + w[tri[1]] + w[tri[2]]) / 3.0))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNorms {
    /// `Σ d_i |w_i|`
    pub l1: f64,
    /// `Σ d_i w_i²`
    pub l2_sq: f64,
    /// `wᵀ K₁ w`
    pub h1_semi_sq: f64,
}

/// Lumped L1 and L2 norms and the H¹ seminorm of a nodal field.
///
/// `lumped` and `laplacian` must come from [`lumped_mass`] and
/// [`assemble_laplacian`] on the same mesh.
pub fn norms(field: &[f64], lumped: &[f64], laplacian: &SparseMatrix) -> Result<FieldNorms> {
    check_len(lumped.len(), field.len())?;
    Ok(FieldNorms {
        l1: lumped.iter().zip(field).map(|(d, w)| d * w.abs()).sum(),
        l2_sq: math::weighted_dot(lumped, field, field),
        h1_semi_sq: laplacian.bilinear(field, field),
    })
}

/// Six-point rule exact for polynomials of degree 4 on a triangle, as
/// barycentric coordinates and weights summing to one.
const QUAD6: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_965;
    const B1: f64 = 1.0 - 2.0 * A1;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const B2: f64 = 1.0 - 2.0 * A2;
    const W2: f64 = 0.109_951_743_655_322;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

fn quad_points(mesh: &MeshCG1, t: usize) -> impl Iterator<Item = ([f64; 3], [f64; 2], f64)> + '_ {
    let tri = mesh.triangles[t];
    let area = mesh.area(t);
    QUAD6.iter().map(move |&(bary, w)| {
        let mut x = [0.0; 2];
        for k in 0..3 {
            x[0] += bary[k] * mesh.nodes[tri[k]][0];
            x[1] += bary[k] * mesh.nodes[tri[k]][1];
        }
        (bary, x, w * area)
    })
}

/// Load vector `b_i = ∫ f φ_i` by per-triangle quadrature.
pub fn load_vector(mesh: &MeshCG1, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.n_nodes()];
    for t in 0..mesh.n_triangles() {
        let tri = mesh.triangles[t];
        for (bary, x, w) in quad_points(mesh, t) {
            let fx = f(x[0], x[1]) * w;
            for k in 0..3 {
                b[tri[k]] += bary[k] * fx;
            }
        }
    }
    b
}

/// `‖u_h − u‖_{L²}` for a nodal field `u_h` and an exact function `u`.
pub fn l2_error(mesh: &MeshCG1, values: &[f64], exact: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for t in 0..mesh.n_triangles() {
        let tri = mesh.triangles[t];
        for (bary, x, w) in quad_points(mesh, t) {
            let uh: f64 = (0..3).map(|k| bary[k] * values[tri[k]]).sum();
            let e = uh - exact(x[0], x[1]);
            acc += w * e * e;
        }
    }
    math::sqrt(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn wave_domain() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 2.0)
    }

    #[test]
    fn mass_integrates_constants() {
        for (r, nx, ny) in [(Rect::UNIT, 3, 5), (wave_domain(), 6, 6), (wave_domain(), 1, 1)] {
            let m = MeshCG1::build(r, nx, ny).unwrap();
            let mass = assemble_mass(&m);
            let ones = vec![1.0; m.n_nodes()];
            assert!((mass.bilinear(&ones, &ones) - r.area()).abs() < 1e-12);
            assert!(mass.asymmetry() <= 1e-12 * mass.max_abs());
        }
    }

    #[test]
    fn unit_square_mass_entries() {
        // Two triangles of area 1/2: (0,1,3) and (0,3,2). Diagonal entries
        // collect area/6 from every adjacent triangle, shared edges area/12.
        let m = MeshCG1::build(Rect::UNIT, 1, 1).unwrap();
        let mass = assemble_mass(&m);
        let a = 0.5;
        assert!((mass.get(0, 0) - 2.0 * a / 6.0).abs() < 1e-15);
        assert!((mass.get(3, 3) - 2.0 * a / 6.0).abs() < 1e-15);
        assert!((mass.get(1, 1) - a / 6.0).abs() < 1e-15);
        assert!((mass.get(0, 3) - 2.0 * a / 12.0).abs() < 1e-15);
        assert!((mass.get(0, 1) - a / 12.0).abs() < 1e-15);
        assert_eq!(mass.get(1, 2), 0.0);
    }

    #[test]
    fn stiffness_kernel_and_scaling() {
        let m = MeshCG1::build(wave_domain(), 5, 7).unwrap();
        let k1 = assemble_laplacian(&m);
        let ones = vec![1.0; m.n_nodes()];
        assert!(k1.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
        assert!(k1.asymmetry() <= 1e-12 * k1.max_abs());

        let k20 = assemble_stiffness(&m, &vec![20.0; m.n_triangles()]).unwrap();
        for (a, b) in k20.values.iter().zip(&k1.values) {
            assert!((a - 20.0 * b).abs() <= 1e-12 * k20.max_abs());
        }

        let w = vec![0.5; m.n_nodes()];
        let coeff = speed_coefficients(&m, &w, 20.0).unwrap();
        let k30 = assemble_stiffness(&m, &coeff).unwrap();
        for (a, b) in k30.values.iter().zip(&k1.values) {
            assert!((a - 30.0 * b).abs() <= 1e-12 * k30.max_abs());
        }
    }

    #[test]
    fn stiffness_rejects_nan() {
        let m = MeshCG1::build(Rect::UNIT, 2, 2).unwrap();
        let mut c = vec![1.0; m.n_triangles()];
        c[3] = f64::NAN;
        assert_eq!(
            assemble_stiffness(&m, &c),
            Err(Error::NonFinite("stiffness coefficient"))
        );
        assert!(assemble_stiffness(&m, &c[1..]).is_err());
    }

    #[test]
    fn lumped_weights() {
        let m = MeshCG1::build(Rect::UNIT, 2, 2).unwrap();
        let d = lumped_mass(&m);
        let mass = assemble_mass(&m);
        for (a, b) in d.iter().zip(mass.row_sums()) {
            assert!((a - b).abs() < 1e-15);
        }
        // The centre node touches all six triangles around it, each of area 1/8.
        assert!((d[4] - 6.0 * 0.125 / 3.0).abs() < 1e-15);
        let m1 = MeshCG1::build(Rect::UNIT, 1, 1).unwrap();
        assert!((lumped_mass(&m1).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mp = MeshCG1::build(wave_domain(), 9, 4).unwrap();
        assert!((lumped_mass(&mp).iter().sum::<f64>() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn norms_of_simple_fields() {
        let m = MeshCG1::build(wave_domain(), 8, 8).unwrap();
        let (d, k) = (lumped_mass(&m), assemble_laplacian(&m));
        let n = norms(&vec![1.0; m.n_nodes()], &d, &k).unwrap();
        assert!((n.l1 - 6.0).abs() < 1e-12 && (n.l2_sq - 6.0).abs() < 1e-12);
        assert!(n.h1_semi_sq.abs() < 1e-12);
        let z = norms(&vec![0.0; m.n_nodes()], &d, &k).unwrap();
        assert_eq!((z.l1, z.l2_sq, z.h1_semi_sq), (0.0, 0.0, 0.0));
        assert!(norms(&[1.0], &d, &k).is_err());
    }

    #[test]
    fn norms_of_linear_field() {
        let m = MeshCG1::build(Rect::UNIT, 64, 64).unwrap();
        let (d, k) = (lumped_mass(&m), assemble_laplacian(&m));
        let n = norms(&m.interpolate(|x, _| x), &d, &k).unwrap();
        assert!((n.h1_semi_sq - 1.0).abs() < 1e-12);
        assert!((n.l2_sq - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn affine_energy_is_exact() {
        let r = Rect::new(-1.0, 1.0, -1.0, 2.0);
        let m = MeshCG1::build(r, 5, 9).unwrap();
        let u = m.interpolate(|x, y| 2.0 * x - 0.5 * y + 3.0);
        let e = assemble_laplacian(&m).bilinear(&u, &u);
        assert!((e - (4.0 + 0.25) * r.area()).abs() < 1e-11);
    }

    #[test]
    fn interpolation_converges_at_second_order() {
        use core::f64::consts::PI;
        let exact = |x: f64, y: f64| libm::sin(PI * x) * libm::sin(PI * y);
        let errs: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let m = MeshCG1::build(Rect::UNIT, n, n).unwrap();
                l2_error(&m, &m.interpolate(exact), exact)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(libm::log2(w[0] / w[1]) >= 1.9, "{errs:?}");
        }
    }

    #[test]
    fn load_vector_matches_mass_on_linears() {
        let m = MeshCG1::build(Rect::UNIT, 4, 3).unwrap();
        let f = |x: f64, y: f64| 1.0 + x - 2.0 * y;
        let b = load_vector(&m, f);
        let mb = assemble_mass(&m).mul_vec(&m.interpolate(f));
        for (a, c) in b.iter().zip(&mb) {
            assert!((a - c).abs() < 1e-14);
        }
    }
}
