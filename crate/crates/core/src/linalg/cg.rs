use super::{axpy, norm, LinearOperator};
use crate::operators::dot;

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖b - A x‖ / ‖b‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Unpreconditioned conjugate gradient for symmetric positive (semi)definite
/// systems with a consistent right-hand side.
pub fn conjugate_gradient<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = a.dim();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return CgOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut it = 0;
    while it < max_iter {
        if rr.sqrt() <= rel_tol * b_norm {
            break;
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        it += 1;
    }
    // true residual, not the recursively updated one
    a.apply(&x, &mut ap);
    let res: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let relative_residual = norm(&res) / b_norm;
    CgOutcome {
        solution: x,
        iterations: it,
        relative_residual,
        converged: relative_residual <= rel_tol * 10.0,
    }
}
