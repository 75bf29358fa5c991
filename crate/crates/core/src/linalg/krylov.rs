//! Block Lanczos with full reorthogonalization and explicit restarts.
//!
//! The Krylov basis is kept in memory and every new block is orthogonalized
//! twice against all previous vectors, so the projected matrix is formed
//! directly as `Vᵀ A V` instead of relying on the three-term recurrence.
//! A block size at least as large as the largest eigenvalue multiplicity of
//! interest is required to resolve degenerate clusters.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dense_symmetric_eigen, norm, LinearOperator};
use crate::error::{Error, Result};
use crate::operators::dot;

#[derive(Debug, Clone)]
pub struct KrylovOptions {
    pub block: usize,
    /// Basis size that triggers a restart.
    pub max_basis: usize,
    /// Cap on block expansion steps, restarts included.
    pub max_iterations: usize,
    /// Residual target relative to the largest wanted Ritz value magnitude.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            block: 8,
            max_basis: 240,
            max_iterations: 400,
            tol: 1e-12,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Descending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖A x - θ x‖` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

struct Basis {
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    /// Upper triangle of `Vᵀ A V`, column-major: `t[j][i]` for `i <= j`.
    t: Vec<Vec<f64>>,
}

impl Basis {
    fn len(&self) -> usize {
        self.v.len()
    }

    fn orthogonalize(&self, x: &mut [f64]) {
        for _ in 0..2 {
            for v in &self.v {
                let c = dot(v, x);
                axpy(-c, v, x);
            }
        }
    }

    fn push<A: LinearOperator + ?Sized>(&mut self, op: &A, x: Vec<f64>) {
        let mut ax = vec![0.0; x.len()];
        op.apply(&x, &mut ax);
        let mut col: Vec<f64> = self.v.iter().map(|v| dot(v, &ax)).collect();
        col.push(dot(&x, &ax));
        self.v.push(x);
        self.av.push(ax);
        self.t.push(col);
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            self.t[b][a]
        })
    }

    fn combine(vs: &[Vec<f64>], coeffs: impl Iterator<Item = f64>) -> Vec<f64> {
        let mut out = vec![0.0; vs[0].len()];
        for (v, c) in vs.iter().zip(coeffs) {
            if c != 0.0 {
                axpy(c, v, &mut out);
            }
        }
        out
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// The `k` algebraically largest eigenpairs of a symmetric operator.
pub fn largest_eigenpairs<A: LinearOperator + ?Sized>(op: &A, k: usize, opts: &KrylovOptions) -> Result<EigenPairs> {
    let n = op.dim();
    if k > n {
        return Err(Error::InvalidParams(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    if k == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
            iterations: 0,
        });
    }
    let b = opts.block.max(1).min(n);
    let max_basis = opts.max_basis.max(k + 2 * b).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis {
        v: Vec::new(),
        av: Vec::new(),
        t: Vec::new(),
    };
    let mut pending: Vec<Vec<f64>> = (0..b).map(|_| random_vector(&mut rng, n)).collect();
    let mut next_check = 0;
    let mut iterations = 0;
    let mut last_worst = f64::INFINITY;

    loop {
        let first_new = basis.len();
        for mut x in pending.drain(..) {
            if basis.len() == n {
                break;
            }
            let mut accepted = false;
            for _attempt in 0..4 {
                let before = norm(&x);
                basis.orthogonalize(&mut x);
                let after = norm(&x);
                if before > 0.0 && after > 1e-10 * before {
                    x.iter_mut().for_each(|v| *v /= after);
                    accepted = true;
                    break;
                }
                // invariant subspace reached along this direction
                x = random_vector(&mut rng, n);
            }
            if accepted {
                basis.push(op, x);
            }
        }
        iterations += 1;
        let m = basis.len();

        let out_of_room = m + b > max_basis;
        if m >= next_check || m == n || out_of_room || iterations >= opts.max_iterations {
            let (theta, s) = dense_symmetric_eigen(basis.projected());
            // descending order
            let order: Vec<usize> = (0..m).rev().collect();
            let keep = (k + b).min(m);
            let mut ritz = Vec::with_capacity(keep);
            let mut aritz = Vec::with_capacity(keep);
            let mut residuals = Vec::with_capacity(keep);
            for &c in order.iter().take(keep) {
                let y = Basis::combine(&basis.v, s.column(c).iter().copied());
                let ay = Basis::combine(&basis.av, s.column(c).iter().copied());
                let mut r = ay.clone();
                axpy(-theta[c], &y, &mut r);
                residuals.push(norm(&r));
                ritz.push(y);
                aritz.push((ay, r));
            }
            let values: Vec<f64> = order.iter().take(keep).map(|&c| theta[c]).collect();
            let kk = k.min(m);
            let scale = values[..kk].iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
            let worst = residuals[..kk].iter().fold(0.0f64, |a, &r| a.max(r / scale));
            last_worst = worst;
            if (worst <= opts.tol && m >= k) || m == n {
                ritz.truncate(kk);
                residuals.truncate(kk);
                return Ok(EigenPairs {
                    values: values[..kk].to_vec(),
                    vectors: ritz,
                    residuals,
                    iterations,
                });
            }
            if iterations >= opts.max_iterations {
                return Err(Error::NotConverged {
                    solver: "block Lanczos",
                    iterations,
                    residual: worst,
                });
            }
            if out_of_room {
                // Rebuild from the Ritz vectors with fresh products so that
                // rounding in the stored `A V` does not accumulate across restarts.
                // continue from the least converged wanted directions
                let mut by_residual: Vec<usize> = (0..keep).collect();
                by_residual.sort_by(|&i, &j| {
                    let wanted = |x: usize| x < kk;
                    wanted(j).cmp(&wanted(i)).then(residuals[j].total_cmp(&residuals[i]))
                });
                pending = by_residual.iter().take(b).map(|&i| aritz[i].1.clone()).collect();
                let mut fresh = Basis {
                    v: Vec::new(),
                    av: Vec::new(),
                    t: Vec::new(),
                };
                for mut y in ritz {
                    fresh.orthogonalize(&mut y);
                    let ny = norm(&y);
                    if ny > 1e-10 {
                        y.iter_mut().for_each(|v| *v /= ny);
                        fresh.push(op, y);
                    }
                }
                basis = fresh;
                next_check = basis.len() + b;
                continue;
            }
            next_check = m + b.max(m / 4);
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged {
                solver: "block Lanczos",
                iterations,
                residual: last_worst,
            });
        }
        pending = basis.av[first_new..].to_vec();
        if pending.is_empty() {
            pending = (0..b).map(|_| random_vector(&mut rng, n)).collect();
        }
    }
}
