//! Orthogonal split of edge fields into `ran grad0` (the Q projector) and
//! `ker div0` (the R projector), Dirichlet Poisson solves, and the harmonic
//! (cohomological) subspace `ker curl ∩ ker div0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::linalg::{
    conjugate_gradient, dense_symmetric_eigen, largest_eigenpairs, BandedCholesky, KrylovOptions, LinearOperator,
    ShiftInvert,
};
use crate::operators::{dot, inner, DiscreteOperators, FieldVector};
use crate::sparse::SparseOperator;
use crate::EPSILON_0;

/// Relative residual target of the Poisson solves.
pub const POISSON_REL_TOL: f64 = 1e-12;
/// A Poisson solution is rejected above this relative residual.
pub const POISSON_ACCEPT_TOL: f64 = 1e-10;
/// Eigenvalues of the 1-form Laplacian below this fraction of its largest
/// eigenvalue estimate count as zero.
pub const ZERO_EIGEN_REL: f64 = 1e-10;
/// Edge-space dimension up to which eigenproblems are solved densely.
pub const DENSE_EIGEN_LIMIT: usize = 600;

/// Largest band storage (entries) for which the direct Poisson path is used.
const DIRECT_BAND_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonMethod {
    /// Banded Cholesky when it fits in memory, CG otherwise.
    Auto,
    ConjugateGradient,
}

/// Solver for the Dirichlet problem `(GᵀG) U = b` on interior vertices.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    laplacian: SparseOperator,
    direct: Option<BandedCholesky>,
}

impl PoissonSolver {
    pub fn new(ops: &DiscreteOperators, method: PoissonMethod) -> Result<Self> {
        let laplacian = ops.vertex_laplacian();
        let direct = match method {
            PoissonMethod::ConjugateGradient => None,
            PoissonMethod::Auto => {
                let factor = BandedCholesky::factor(&laplacian)?;
                if factor.dim() * (factor.bandwidth() + 1) <= DIRECT_BAND_LIMIT {
                    Some(factor)
                } else {
                    None
                }
            }
        };
        Ok(PoissonSolver { laplacian, direct })
    }

    pub fn is_direct(&self) -> bool {
        self.direct.is_some()
    }

    pub fn laplacian(&self) -> &SparseOperator {
        &self.laplacian
    }

    /// Solves `(GᵀG) x = b` and checks the relative residual.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.laplacian.nrows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let (x, iterations) = match &self.direct {
            Some(f) => (f.solve(b), 1),
            None => {
                let out = conjugate_gradient(&self.laplacian, b, POISSON_REL_TOL, 20 * n + 100);
                (out.solution, out.iterations)
            }
        };
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_norm > 0.0 {
            let ax = self.laplacian.mul_vec(&x);
            let r = ax.iter().zip(b).map(|(a, bi)| (a - bi) * (a - bi)).sum::<f64>().sqrt() / b_norm;
            if !(r <= POISSON_ACCEPT_TOL) {
                return Err(Error::NotConverged {
                    solver: "Poisson",
                    iterations,
                    residual: r,
                });
            }
        }
        Ok(x)
    }
}

/// Result of projecting a field: `v = gradient_part + divfree_part` with
/// `gradient_part = G potential`.
#[derive(Debug, Clone)]
pub struct HodgeSplit {
    pub gradient_part: FieldVector,
    pub divfree_part: FieldVector,
    pub potential: Vec<f64>,
}

impl HodgeSplit {
    /// `|⟨Qv, Rv⟩|`.
    pub fn orthogonality_residual(&self) -> f64 {
        inner(&self.gradient_part, &self.divfree_part).expect("same grid").abs()
    }
}

/// Projectors of one grid; holds the factorized Poisson operator.
#[derive(Debug, Clone)]
pub struct Hodge<'a> {
    ops: &'a DiscreteOperators,
    poisson: PoissonSolver,
}

impl<'a> Hodge<'a> {
    pub fn new(ops: &'a DiscreteOperators) -> Result<Self> {
        Self::with_method(ops, PoissonMethod::Auto)
    }

    pub fn with_method(ops: &'a DiscreteOperators, method: PoissonMethod) -> Result<Self> {
        Ok(Hodge {
            ops,
            poisson: PoissonSolver::new(ops, method)?,
        })
    }

    pub fn operators(&self) -> &DiscreteOperators {
        self.ops
    }

    pub fn poisson(&self) -> &PoissonSolver {
        &self.poisson
    }

    /// Potential `U` with `ε₀ ΔU = -ρ` and `U = 0` on the conductor, where
    /// `Δ = div0 grad0 = -GᵀG`.
    pub fn poisson_dirichlet(&self, rho: &[f64]) -> Result<Vec<f64>> {
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("charge density must be finite".into()));
        }
        let b: Vec<f64> = rho.iter().map(|r| r / EPSILON_0).collect();
        self.poisson.solve(&b)
    }

    /// `Q v = G (GᵀG)⁻¹ Gᵀ v` and `R v = v - Q v`.
    pub fn project_q(&self, v: &FieldVector) -> Result<HodgeSplit> {
        if v.grid_id() != self.ops.grid.id() {
            return Err(Error::GridMismatch);
        }
        let gt_v = self.ops.grad.mul_vec_transposed(v.values());
        let potential = self.poisson.solve(&gt_v)?;
        let gradient_part = self.ops.grad_of(&potential);
        let divfree_part = v.sub(&gradient_part)?;
        Ok(HodgeSplit {
            gradient_part,
            divfree_part,
            potential,
        })
    }
}

/// Orthonormal basis of the harmonic fields (curl-free, divergence-free,
/// tangential component zero on the conductor).
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub vectors: Vec<FieldVector>,
}

impl HarmonicBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Shift used for shift-and-invert eigensolves on a grid: the square of the
/// lowest continuum wavenumber scale `π / L`.
pub(crate) fn spectral_shift(grid: &Grid) -> f64 {
    let l = grid.spec().width.max(grid.spec().height);
    (std::f64::consts::PI / l).powi(2)
}

/// Smallest eigenpairs (ascending) of a symmetric positive semidefinite edge
/// operator. Dense below [`DENSE_EIGEN_LIMIT`], shift-and-invert block
/// Lanczos above.
pub(crate) fn smallest_eigenpairs(
    a: &SparseOperator,
    count: usize,
    shift: f64,
    tol: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.nrows();
    let count = count.min(n);
    if n <= DENSE_EIGEN_LIMIT {
        let (vals, vecs) = dense_symmetric_eigen(a.to_dense());
        let vectors = (0..count).map(|c| vecs.column(c).iter().copied().collect()).collect();
        return Ok((vals[..count].to_vec(), vectors));
    }
    let op = ShiftInvert::new(a, shift)?;
    let opts = KrylovOptions {
        block: 8,
        max_basis: (4 * count + 80).max(160),
        max_iterations: 50 * count.max(4),
        tol,
        seed,
    };
    let pairs = largest_eigenpairs(&op, count, &opts)?;
    let values = pairs.values.iter().map(|theta| 1.0 / theta - shift).collect();
    Ok((values, pairs.vectors))
}

/// Deterministic orthonormal basis of the span of `vectors` (assumed
/// orthonormal): projected unit vectors are taken in DOF order, then each
/// result is signed so its first significant component is positive.
pub(crate) fn canonical_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = vectors.len();
    if c == 0 {
        return Vec::new();
    }
    let n = vectors[0].len();
    if c == 1 {
        let mut v = vectors[0].clone();
        fix_sign(&mut v);
        return vec![v];
    }
    let weight: Vec<f64> = (0..n).map(|i| vectors.iter().map(|v| v[i] * v[i]).sum()).collect();
    let max_w = weight.iter().copied().fold(0.0, f64::max);
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(c);
    for i in 0..n {
        if chosen.len() == c {
            break;
        }
        if weight[i] < 1e-3 * max_w {
            continue;
        }
        let mut w = vec![0.0; n];
        for v in vectors {
            crate::linalg::axpy(v[i], v, &mut w);
        }
        for _ in 0..2 {
            for u in &chosen {
                let d = dot(u, &w);
                crate::linalg::axpy(-d, u, &mut w);
            }
        }
        let nw = dot(&w, &w);
        if nw >= 1e-3 * weight[i] {
            let s = nw.sqrt();
            w.iter_mut().for_each(|x| *x /= s);
            chosen.push(w);
        }
    }
    // The threshold above can only skip directions when the span is badly
    // conditioned; fall back to the input order for the remainder.
    for v in vectors {
        if chosen.len() == c {
            break;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &chosen {
                let d = dot(u, &w);
                crate::linalg::axpy(-d, u, &mut w);
            }
        }
        let nw = dot(&w, &w).sqrt();
        if nw > 1e-6 {
            w.iter_mut().for_each(|x| *x /= nw);
            chosen.push(w);
        }
    }
    for v in &mut chosen {
        fix_sign(v);
    }
    chosen
}

pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-6 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Raw (Euclidean unit) vectors to fields normalized under the weighted inner product.
pub(crate) fn to_fields(grid: &Grid, vectors: Vec<Vec<f64>>) -> Vec<FieldVector> {
    let inv_h = 1.0 / grid.h();
    vectors
        .into_iter()
        .map(|v| FieldVector::from_values(grid, v.into_iter().map(|x| x * inv_h).collect()).expect("edge-sized"))
        .collect()
}

/// Orthonormal basis of `ker(CᵀC + G Gᵀ)`.
pub fn harmonic_basis(ops: &DiscreteOperators) -> Result<HarmonicBasis> {
    harmonic_basis_seeded(ops, 42)
}

pub fn harmonic_basis_seeded(ops: &DiscreteOperators, seed: u64) -> Result<HarmonicBasis> {
    let grid = &ops.grid;
    let n = grid.dof_edges().len();
    if n == 0 {
        return Ok(HarmonicBasis { vectors: vec![] });
    }
    let l1 = ops.edge_laplacian(1.0);
    let threshold = ZERO_EIGEN_REL * l1.norm_inf();
    let shift = spectral_shift(grid);
    let mut request = 4usize.min(n);
    let kernel = loop {
        let (vals, vecs) = smallest_eigenpairs(&l1, request, shift, 1e-13, seed)?;
        let zeros = vals.iter().take_while(|&&v| v <= threshold).count();
        if zeros < request || request == n {
            break vecs.into_iter().take(zeros).collect::<Vec<_>>();
        }
        request = (2 * request).min(n);
    };
    let vectors = to_fields(grid, canonical_basis(&kernel));
    Ok(HarmonicBasis { vectors })
}

/// Largest principal angle (radians) between the spans of two orthonormal
/// families; `π/2` when the dimensions differ.
pub fn max_principal_angle(a: &[FieldVector], b: &[FieldVector]) -> Result<f64> {
    if a.len() != b.len() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let p = a.len();
    // residual of projecting each a_i onto span(b)
    let mut residuals = Vec::with_capacity(p);
    for ai in a {
        let mut r = ai.clone();
        for bj in b {
            let c = inner(bj, ai)?;
            r = r.sub(&bj.scale(c))?;
        }
        residuals.push(r);
    }
    let gram = DMatrix::from_fn(p, p, |i, j| inner(&residuals[i], &residuals[j]).expect("same grid"));
    let (vals, _) = dense_symmetric_eigen(gram);
    let s = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt().min(1.0);
    Ok(s.asin())
}

/// Norms used by the harmonic and mode invariants, in the weighted metric:
/// `(‖C v‖, ‖Gᵀ v‖)`.
pub fn curl_div_norms(ops: &DiscreteOperators, v: &FieldVector) -> (f64, f64) {
    let h2 = ops.grid.h() * ops.grid.h();
    let c = ops.curl.mul_vec(v.values());
    let d = ops.grad.mul_vec_transposed(v.values());
    ((h2 * dot(&c, &c)).sqrt(), (h2 * dot(&d, &d)).sqrt())
}

impl LinearOperator for PoissonSolver {
    fn dim(&self) -> usize {
        self.laplacian.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.laplacian.apply(x, y)
    }
}
