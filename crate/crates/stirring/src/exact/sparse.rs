//! Sparse matrices over an exact or floating scalar field.
//!
//! Row-major CSR with explicit zeros stripped. These matrices stay small
//! (thousands of rows) but their entries may be arbitrary-precision
//! rationals, so the implementation favours clarity over cache tricks.

use crate::error::{Error, Result};
use crate::ratio::Scalar;

/// Default cap on stored nonzeros (overridable per call site).
pub const DEFAULT_NNZ_CAP: usize = 10_000_000;

/// A sparse real matrix; scalar field is a type parameter, never mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T> {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseOperator<T> {
    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// zeros stripped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, T)>,
    ) -> Self {
        triplets.sort_by_key(|(r, c, _)| (*r, *c));
        let mut indptr = vec![0usize; n_rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "triplet out of bounds");
            if let (Some(&lr), Some(&lc)) = (rows.last(), indices.last()) {
                if lr == r && lc == c {
                    let last = values.last_mut().unwrap();
                    *last = last.add(&v);
                    continue;
                }
            }
            rows.push(r);
            indices.push(c);
            values.push(v);
        }
        // Strip explicit zeros (possibly created by cancellation).
        let mut keep_indices = Vec::with_capacity(indices.len());
        let mut keep_values = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if !v.is_zero() {
                indptr[r + 1] += 1;
                keep_indices.push(c);
                keep_values.push(v);
            }
        }
        for r in 0..n_rows {
            indptr[r + 1] += indptr[r];
        }
        SparseOperator {
            n_rows,
            n_cols,
            indptr,
            indices: keep_indices,
            values: keep_values,
        }
    }

    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        SparseOperator {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseOperator {
            n_rows: n,
            n_cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Errors if the matrix holds more than `cap` nonzeros.
    pub fn check_nnz(&self, cap: usize) -> Result<()> {
        if self.nnz() > cap {
            Err(Error::TooLarge(format!(
                "{} nonzeros exceed the cap of {cap}",
                self.nnz()
            )))
        } else {
            Ok(())
        }
    }

    /// Entries of one row as (column, value) pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &T)> {
        self.indices[self.indptr[r]..self.indptr[r + 1]]
            .iter()
            .copied()
            .zip(&self.values[self.indptr[r]..self.indptr[r + 1]])
    }

    /// All entries as (row, column, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        (0..self.n_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|(col, _)| *col == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(T::zero)
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.iter().map(|(r, c, v)| (c, r, v.clone())).collect();
        SparseOperator::from_triplets(self.n_cols, self.n_rows, triplets)
    }

    pub fn scale(&self, factor: &T) -> Self {
        let triplets = self
            .iter()
            .map(|(r, c, v)| (r, c, v.mul(factor)))
            .collect();
        SparseOperator::from_triplets(self.n_rows, self.n_cols, triplets)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut triplets: Vec<(usize, usize, T)> =
            self.iter().map(|(r, c, v)| (r, c, v.clone())).collect();
        triplets.extend(other.iter().map(|(r, c, v)| (r, c, v.clone())));
        SparseOperator::from_triplets(self.n_rows, self.n_cols, triplets)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&T::zero().sub(&T::one())))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows, "dimension mismatch");
        let mut triplets = Vec::new();
        let mut acc: Vec<Option<T>> = vec![None; other.n_cols];
        for r in 0..self.n_rows {
            let mut touched = Vec::new();
            for (k, v) in self.row(r) {
                for (c, w) in other.row(k) {
                    let prod = v.mul(w);
                    match &mut acc[c] {
                        Some(cur) => *cur = cur.add(&prod),
                        slot => {
                            *slot = Some(prod);
                            touched.push(c);
                        }
                    }
                }
            }
            for c in touched {
                if let Some(v) = acc[c].take() {
                    if !v.is_zero() {
                        triplets.push((r, c, v));
                    }
                }
            }
        }
        SparseOperator::from_triplets(self.n_rows, other.n_cols, triplets)
    }

    /// `self * x` for a dense vector.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols);
        let mut out = vec![T::zero(); self.n_rows];
        for (r, c, v) in self.iter() {
            out[r] = out[r].add(&v.mul(&x[c]));
        }
        out
    }

    /// Largest entry magnitude as a double (0 for the zero matrix).
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs_f64())
            .fold(0.0, f64::max)
    }

    /// True if every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Row sums as a dense vector.
    pub fn row_sums(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_rows];
        for (r, _, v) in self.iter() {
            out[r] = out[r].add(v);
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.n_cols]; self.n_rows];
        for (r, c, v) in self.iter() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Maps the scalar field entrywise (e.g. rational to double).
    pub fn map_scalars<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseOperator<U> {
        let triplets = self.iter().map(|(r, c, v)| (r, c, f(v))).collect();
        SparseOperator::from_triplets(self.n_rows, self.n_cols, triplets)
    }

    /// Writes MatrixMarket coordinate format (1-based indices, doubles).
    pub fn write_matrix_market(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v.signed_f64())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int, Ratio};

    fn small() -> SparseOperator<Ratio> {
        SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 0, int(1)), (0, 1, frac(1, 2)), (1, 0, int(-1))],
        )
    }

    #[test]
    fn triplets_merge_and_strip_zeros() {
        let m = SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 0, int(1)), (0, 0, int(-1)), (1, 1, int(3))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), int(3));
        assert_eq!(m.get(0, 0), int(0));
    }

    #[test]
    fn matmul_and_transpose() {
        let m = small();
        let id = SparseOperator::identity(2);
        assert_eq!(m.matmul(&id), m);
        let mt = m.transpose();
        assert_eq!(mt.get(1, 0), frac(1, 2));
        assert_eq!(mt.get(0, 1), int(-1));
        // (M M^T)_{00} = 1 + 1/4.
        assert_eq!(m.matmul(&mt).get(0, 0), frac(5, 4));
    }

    #[test]
    fn apply_matches_dense() {
        let m = small();
        let x = vec![int(2), int(4)];
        assert_eq!(m.apply(&x), vec![int(4), int(-2)]);
    }
}
