//! Linear solvers and symmetric eigensolvers used by the field modules.

mod banded;
mod cg;
mod krylov;

pub use banded::{reverse_cuthill_mckee, BandedCholesky};
pub use cg::{conjugate_gradient, CgOutcome};
pub use krylov::{largest_eigenpairs, EigenPairs, KrylovOptions};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::sparse::SparseOperator;

/// Symmetric linear map `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        SparseOperator::apply(self, x, y)
    }
}

/// `(A + τ I)⁻¹` through a banded Cholesky factor.
pub struct ShiftInvert {
    factor: BandedCholesky,
}

impl ShiftInvert {
    pub fn new(a: &SparseOperator, shift: f64) -> crate::Result<Self> {
        let shifted = a.add_scaled(&SparseOperator::identity(a.nrows()), shift)?;
        Ok(ShiftInvert {
            factor: BandedCholesky::factor(&shifted)?,
        })
    }
}

impl LinearOperator for ShiftInvert {
    fn dim(&self) -> usize {
        self.factor.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.factor.solve_in_place(y);
    }
}

/// Full ascending eigendecomposition of a dense symmetric matrix; columns of
/// the returned matrix are eigenvectors.
pub fn dense_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
