//! Transverse cavity modes: divergence-free eigenfields of `CᵀC` with the
//! conductor boundary condition, `CᵀC f = (ω/c)² f`, `Gᵀ f = 0`.
//!
//! The eigenproblem is solved on `A = CᵀC + σ G Gᵀ`. On `ran G` this acts as
//! `σ GᵀG`, on `ker Gᵀ` as `CᵀC`, so both families appear in the spectrum of
//! `A`. On rectangles the two discrete spectra coincide exactly for every
//! interior index pair, so instead of trusting the shift to separate them,
//! each computed cluster is split by diagonalizing `Gᵀ` restricted to it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::hodge::{canonical_basis, smallest_eigenpairs, spectral_shift, Hodge, ZERO_EIGEN_REL};
use crate::linalg::dense_symmetric_eigen;
use crate::operators::{dot, inner, DiscreteOperators, FieldVector};
use crate::SPEED_OF_LIGHT;

/// Largest accepted `‖CᵀC f − (ω/c)² f‖` for a unit mode.
pub const MODE_RESIDUAL_TOL: f64 = 1e-8;
/// Relative eigenvalue spread below which modes count as degenerate.
pub const DEGENERACY_REL: f64 = 1e-9;
/// Relative window used to decide which computed pairs may mix the
/// gradient and transverse families.
const SPLIT_WINDOW_REL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ModeOptions {
    /// Gradient-block shift.
    pub sigma: f64,
    /// Convergence target of the iterative eigensolver (relative, on the
    /// shift-inverted operator).
    pub tol: f64,
    pub seed: u64,
}

impl Default for ModeOptions {
    fn default() -> Self {
        ModeOptions {
            sigma: 1.0,
            tol: 1e-13,
            seed: 42,
        }
    }
}

/// Ascending transverse modes, orthonormal under [`inner`].
#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub omegas: Vec<f64>,
    pub vectors: Vec<FieldVector>,
    pub zero_mode_count: usize,
    /// `‖CᵀC f − (ω/c)² f‖` per mode.
    pub residuals: Vec<f64>,
    grid: Grid,
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The zero-frequency block.
    pub fn zero_modes(&self) -> &[FieldVector] {
        &self.vectors[..self.zero_mode_count]
    }

    pub fn mode(&self, index: usize) -> Result<&FieldVector> {
        self.vectors.get(index).ok_or(Error::ModeIndex {
            index,
            count: self.len(),
        })
    }

    /// `f_λ` sampled at the edges nearest to `point`.
    pub fn eval_at(&self, index: usize, point: [f64; 2]) -> Result<[f64; 2]> {
        let f = self.mode(index)?;
        let pair = self.grid.locate(point)?;
        Ok([f.values()[pair.x_dof], f.values()[pair.y_dof]])
    }
}

pub fn eval_mode_at(basis: &ModeBasis, index: usize, point: [f64; 2]) -> Result<[f64; 2]> {
    basis.eval_at(index, point)
}

/// The `k` lowest transverse modes, zero modes included.
pub fn transverse_modes(ops: &DiscreteOperators, k: usize) -> Result<ModeBasis> {
    transverse_modes_with(ops, k, &ModeOptions::default())
}

pub fn transverse_modes_with(ops: &DiscreteOperators, k: usize, opts: &ModeOptions) -> Result<ModeBasis> {
    let grid = &ops.grid;
    let n = grid.dof_edges().len();
    let available = n - grid.dof_vertices().len();
    if k > available {
        return Err(Error::TooManyModes { requested: k, available });
    }
    if !(opts.sigma > 0.0) {
        return Err(Error::InvalidParams("gradient shift must be positive".into()));
    }
    let empty = ModeBasis {
        omegas: vec![],
        vectors: vec![],
        zero_mode_count: 0,
        residuals: vec![],
        grid: grid.clone(),
    };
    if k == 0 {
        return Ok(empty);
    }

    let a = ops.curl.transpose().matmul(&ops.curl)?.add_scaled(&ops.grad.matmul(&ops.grad.transpose())?, opts.sigma)?;
    let a_norm = a.norm_inf();
    let zero_threshold = ZERO_EIGEN_REL * a_norm;
    let shift = spectral_shift(grid);
    let hodge = Hodge::new(ops)?;

    let mut request = (2 * k + 8).min(n);
    let transverse = loop {
        let (values, vectors) = smallest_eigenpairs(&a, request, shift, opts.tol, opts.seed)?;
        let found = split_families(ops, &hodge, &values, &vectors, opts.sigma, zero_threshold)?;
        let complete = request == n
            || (found.len() >= k && {
                let kth = found[k - 1].0;
                let top = *values.last().expect("nonempty");
                top > kth + SPLIT_WINDOW_REL * kth.abs().max(zero_threshold)
            });
        if complete {
            break found;
        }
        request = (2 * request).min(n);
    };

    let ctc = ops.curl.transpose().matmul(&ops.curl)?;
    let mut omegas = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut zero_mode_count = 0;
    for (lambda, v) in transverse.into_iter().take(k) {
        let zero = lambda <= zero_threshold;
        let lambda = if zero { 0.0 } else { lambda };
        let mut r = ctc.mul_vec(&v);
        crate::linalg::axpy(-lambda, &v, &mut r);
        let residual = dot(&r, &r).sqrt();
        if !(residual <= MODE_RESIDUAL_TOL) {
            return Err(Error::NotConverged {
                solver: "transverse eigensolver",
                iterations: request,
                residual,
            });
        }
        if zero {
            zero_mode_count += 1;
        }
        omegas.push(SPEED_OF_LIGHT * lambda.sqrt());
        residuals.push(residual);
        vectors.push(v);
    }
    Ok(ModeBasis {
        omegas,
        vectors: crate::hodge::to_fields(grid, vectors),
        zero_mode_count,
        residuals,
        grid: grid.clone(),
    })
}

/// Groups consecutive ascending values whose spread stays within `rel`.
fn clusters(values: &[f64], rel: f64, floor: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || values[i] - values[start] > rel * values[i].abs().max(floor);
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Separates the transverse eigenpairs from the gradient ones, returning
/// ascending `(eigenvalue, unit vector)` pairs in canonical form.
fn split_families(
    ops: &DiscreteOperators,
    hodge: &Hodge<'_>,
    values: &[f64],
    vectors: &[Vec<f64>],
    sigma: f64,
    zero_threshold: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = &ops.grid;
    let mut out = Vec::new();
    for range in clusters(values, SPLIT_WINDOW_REL, zero_threshold) {
        let vs = &vectors[range.clone()];
        let c = vs.len();
        let lambda_max = values[range.end - 1].max(zero_threshold);
        // Gram matrix of Gᵀ on the cluster: ‖Gᵀv‖² = λ/σ for gradients, 0 for transverse
        let gt: Vec<Vec<f64>> = vs.iter().map(|v| ops.grad.mul_vec_transposed(v)).collect();
        let m = DMatrix::from_fn(c, c, |i, j| dot(&gt[i], &gt[j]));
        let (mu, y) = dense_symmetric_eigen(m);
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for (col, &mu_j) in mu.iter().enumerate() {
            if mu_j > 0.5 * lambda_max / sigma {
                continue;
            }
            let mut w = vec![0.0; vs[0].len()];
            for (v, &coef) in vs.iter().zip(y.column(col).iter()) {
                crate::linalg::axpy(coef, v, &mut w);
            }
            // remove the residual gradient component exactly
            let field = FieldVector::from_values(grid, w)?;
            kept.push(hodge.project_q(&field)?.divfree_part.into_values());
        }
        if kept.is_empty() {
            continue;
        }
        let kept = orthonormalize(kept);
        // Rayleigh–Ritz of CᵀC on the kept span
        let cv: Vec<Vec<f64>> = kept.iter().map(|v| ops.curl.mul_vec(v)).collect();
        let p = kept.len();
        let t = DMatrix::from_fn(p, p, |i, j| dot(&cv[i], &cv[j]));
        let (theta, s) = dense_symmetric_eigen(t);
        let ritz: Vec<Vec<f64>> = (0..p)
            .map(|col| {
                let mut w = vec![0.0; kept[0].len()];
                for (v, &coef) in kept.iter().zip(s.column(col).iter()) {
                    crate::linalg::axpy(coef, v, &mut w);
                }
                w
            })
            .collect();
        for sub in clusters(&theta, DEGENERACY_REL, zero_threshold) {
            let mean = theta[sub.clone()].iter().sum::<f64>() / sub.len() as f64;
            for v in canonical_basis(&ritz[sub]) {
                out.push((mean.max(0.0), v));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn orthonormalize(mut vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs.iter_mut() {
        for _ in 0..2 {
            for u in &out {
                let d = dot(u, v);
                crate::linalg::axpy(-d, u, v);
            }
        }
        let nv = dot(v, v).sqrt();
        if nv > 1e-8 {
            out.push(v.iter().map(|x| x / nv).collect());
        }
    }
    out
}

/// Gram matrix deviation `max |⟨f_i, f_j⟩ − δ_ij|`.
pub fn orthonormality_defect(vectors: &[FieldVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate().skip(i) {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(u, v)? - expect).abs());
        }
    }
    Ok(worst)
}
