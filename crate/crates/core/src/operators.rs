//! Mimetic grad/curl/div on the staggered grid.
//!
//! Vector fields are point samples of the tangential component at edge
//! midpoints, scalars live on vertices, curls on faces. Every space carries
//! the same uniform quadrature weight `h²`, which makes `div0 = -grad0ᵀ`
//! the exact adjoint and `curl * grad0 = 0` hold entry by entry.

use crate::error::{Error, Result};
use crate::geometry::{Grid, GridId};
use crate::sparse::SparseOperator;

/// Edge-sampled in-plane vector field on the interior edges of a grid.
///
/// The x-edge block precedes the y-edge block. Tangential samples on the
/// conductor are identically zero and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    values: Vec<f64>,
    grid: GridId,
    h: f64,
}

impl FieldVector {
    pub fn zeros(grid: &Grid) -> Self {
        FieldVector {
            values: vec![0.0; grid.dof_edges().len()],
            grid: grid.id(),
            h: grid.h(),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.dof_edges().len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(FieldVector {
            values,
            grid: grid.id(),
            h: grid.h(),
        })
    }

    /// Samples `f(x, y) = (vx, vy)` at the interior edge midpoints, keeping the
    /// component along each edge.
    pub fn sample(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let nx_dofs = grid.dof_x_edge_count();
        let values = grid
            .dof_edges()
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let [x, y] = grid.edge_midpoint(e);
                let v = f(x, y);
                if k < nx_dofs {
                    v[0]
                } else {
                    v[1]
                }
            })
            .collect();
        FieldVector {
            values,
            grid: grid.id(),
            h: grid.h(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn grid_id(&self) -> GridId {
        self.grid
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        FieldVector {
            values,
            grid: self.grid,
            h: self.h,
        }
    }

    pub fn norm(&self) -> f64 {
        inner(self, self).expect("same grid").sqrt()
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, s: f64) -> FieldVector {
        self.with_values(self.values.iter().map(|a| a * s).collect())
    }

    fn check(&self, other: &FieldVector) -> Result<()> {
        if self.grid != other.grid || self.values.len() != other.values.len() {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }
}

/// `h² Σ_e u_e v_e`.
pub fn inner(u: &FieldVector, v: &FieldVector) -> Result<f64> {
    u.check(v)?;
    Ok(u.h * u.h * dot(&u.values, &v.values))
}

/// Weighted inner product of vertex (or face) arrays: `h² Σ a_i b_i`.
pub fn inner_scalar(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    grid.h() * grid.h() * dot(a, b)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient from interior vertices to interior edges: `(G u)_e = (u_head - u_tail) / h`,
/// conductor vertices contributing zero.
pub fn build_grad0(grid: &Grid) -> SparseOperator {
    let inv_h = 1.0 / grid.h();
    let mut trip = Vec::with_capacity(2 * grid.dof_edges().len());
    for (row, &e) in grid.dof_edges().iter().enumerate() {
        let (tail, head) = grid.edge_vertices(e);
        if let Some(c) = grid.vertex_dof(tail) {
            trip.push((row, c, -inv_h));
        }
        if let Some(c) = grid.vertex_dof(head) {
            trip.push((row, c, inv_h));
        }
    }
    SparseOperator::from_triplets(grid.dof_edges().len(), grid.dof_vertices().len(), trip)
}

/// Counter-clockwise circulation per inside face divided by `h`.
pub fn build_curl(grid: &Grid) -> SparseOperator {
    let inv_h = 1.0 / grid.h();
    let signs = [inv_h, inv_h, -inv_h, -inv_h];
    let mut trip = Vec::with_capacity(4 * grid.inside_faces().len());
    for (row, &f) in grid.inside_faces().iter().enumerate() {
        for (e, s) in grid.face_edges(f).into_iter().zip(signs) {
            if let Some(c) = grid.edge_dof(e) {
                trip.push((row, c, s));
            }
        }
    }
    SparseOperator::from_triplets(grid.inside_faces().len(), grid.dof_edges().len(), trip)
}

/// `div0 = -grad0ᵀ`.
pub fn build_div0(grid: &Grid) -> SparseOperator {
    build_grad0(grid).transpose().scaled(-1.0)
}

/// The three assembled operators of one grid.
#[derive(Debug, Clone)]
pub struct DiscreteOperators {
    pub grid: Grid,
    pub grad: SparseOperator,
    pub curl: SparseOperator,
    pub div: SparseOperator,
}

impl DiscreteOperators {
    pub fn new(grid: Grid) -> Self {
        let grad = build_grad0(&grid);
        let curl = build_curl(&grid);
        let div = build_div0(&grid);
        DiscreteOperators { grid, grad, curl, div }
    }

    pub fn grad_of(&self, u: &[f64]) -> FieldVector {
        FieldVector::from_values(&self.grid, self.grad.mul_vec(u)).expect("grad has dof_edges rows")
    }

    pub fn div_of(&self, v: &FieldVector) -> Vec<f64> {
        self.div.mul_vec(v.values())
    }

    pub fn curl_of(&self, v: &FieldVector) -> Vec<f64> {
        self.curl.mul_vec(v.values())
    }

    /// Dirichlet Laplacian `GᵀG` on interior vertices (symmetric positive definite).
    pub fn vertex_laplacian(&self) -> SparseOperator {
        self.grad.transpose().matmul(&self.grad).expect("conforming shapes")
    }

    /// `CᵀC + σ G Gᵀ` on interior edges.
    pub fn edge_laplacian(&self, sigma: f64) -> SparseOperator {
        let cc = self.curl.transpose().matmul(&self.curl).expect("conforming shapes");
        let gg = self.grad.matmul(&self.grad.transpose()).expect("conforming shapes");
        cc.add_scaled(&gg, sigma).expect("conforming shapes")
    }
}
