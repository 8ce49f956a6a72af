//! Compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};

/// CSR matrix. Column indices are sorted and unique within every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    /// Explicit zeros are kept so that matrices assembled over the same mesh
    /// share one sparsity pattern.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n_rows && c < n_cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        self.col_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        match self.col_indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n_rows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut trip = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                trip.push((c, r, v));
            }
        }
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, trip)
    }

    /// `max |A - Aᵀ|` over all entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// `Σ_k alpha_k A_k` for matrices sharing one sparsity pattern.
    pub fn combine(terms: &[(f64, &SparseMatrix)]) -> Result<SparseMatrix> {
        let (first_alpha, first) = terms
            .first()
            .ok_or(Error::InvalidParameter("empty linear combination"))?;
        let mut out = (*first).clone();
        out.scale(*first_alpha);
        for (alpha, m) in &terms[1..] {
            if m.row_offsets != out.row_offsets || m.col_indices != out.col_indices {
                return Err(Error::InvalidParameter("matrices do not share a sparsity pattern"));
            }
            for (o, v) in out.values.iter_mut().zip(&m.values) {
                *o += alpha * v;
            }
        }
        Ok(out)
    }

    /// Symmetric elimination of the given rows and columns: their
    /// off-diagonal entries become zero and the diagonal becomes one.
    pub fn eliminate_symmetric(&mut self, fixed: &[bool]) -> Result<()> {
        check_len(self.n_rows, fixed.len())?;
        for r in 0..self.n_rows {
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                let c = self.col_indices[k];
                if fixed[r] || fixed[c] {
                    self.values[k] = if r == c { 1.0 } else { 0.0 };
                }
            }
        }
        Ok(())
    }

    /// Row-major dense copy; meant for tests on small systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![(1, 2, 1.0), (0, 1, 2.0), (1, 0, 3.0), (0, 1, 4.0), (1, 2, 0.5)],
        );
        assert_eq!(m.row_offsets, vec![0, 1, 3]);
        assert_eq!(m.col_indices, vec![1, 0, 2]);
        assert_eq!(m.values, vec![6.0, 3.0, 1.5]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 2.0]), vec![6.0, 6.0]);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.transpose().get(2, 1), 1.5);
    }

    #[test]
    fn combine_requires_same_pattern() {
        let a = SparseMatrix::identity(3);
        let b = SparseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let c = SparseMatrix::combine(&[(2.0, &a), (-1.0, &b)]).unwrap();
        assert_eq!(c.values, vec![1.0, 0.0, -1.0]);
        let other = SparseMatrix::from_triplets(3, 3, vec![(0, 1, 1.0)]);
        assert!(SparseMatrix::combine(&[(1.0, &a), (1.0, &other)]).is_err());
    }

    #[test]
    fn elimination_keeps_symmetry() {
        let mut m = SparseMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 2.0),
            ],
        );
        m.eliminate_symmetric(&[true, false, false]).unwrap();
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(1, 1), 2.0);
    }
}
