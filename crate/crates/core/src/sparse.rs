//! Deterministic compressed-row sparse matrices.
//!
//! Assembly goes through a triplet list that is stably sorted by
//! `(row, col)`; duplicates are summed in insertion order so equal inputs
//! always produce bit-identical storage.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        for &(r, c, _) in &triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}x{ncols}");
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    /// Stored entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// All stored entries, sorted by `(row, col)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`, each row summed in column order.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.apply(x, &mut y);
        y
    }

    /// `y = Aᵀ x` without forming the transpose.
    pub fn mul_vec_transposed(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.cols[k]] += self.vals[k] * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        SparseOperator {
            vals: self.vals.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// Sparse product `self * other`. Structural entries are kept even when
    /// they cancel to 0.0.
    pub fn matmul(&self, other: &SparseOperator) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut trip = Vec::new();
        let mut acc = vec![0.0; other.ncols];
        let mut seen = vec![usize::MAX; other.ncols];
        let mut touched = Vec::new();
        for r in 0..self.nrows {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if seen[c] != r {
                        seen[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                trip.push((r, c, acc[c]));
            }
        }
        Ok(Self::from_triplets(self.nrows, other.ncols, trip))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SparseOperator, s: f64) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        let mut trip: Vec<_> = self.triplets().collect();
        trip.extend(other.triplets().map(|(r, c, v)| (r, c, s * v)));
        Ok(Self::from_triplets(self.nrows, self.ncols, trip))
    }

    /// Largest absolute row sum; an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A - Aᵀ|` over all entries.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Text dump, one `row col value` line per stored entry in sorted order.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }
}
