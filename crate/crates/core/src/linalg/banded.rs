use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// Reverse Cuthill–McKee ordering of a structurally symmetric matrix.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseOperator) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).map(|(c, _)| c).filter(|&c| c != r).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));

    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                order.push(u);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(start: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if level[u] == usize::MAX {
                level[u] = level[v] + 1;
                queue.push_back(u);
            }
        }
    }
    level
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut v = seed;
    let mut ecc = 0;
    loop {
        let level = bfs_levels(v, adj);
        let depth = level.iter().copied().filter(|&l| l != usize::MAX).max().unwrap_or(0);
        if depth <= ecc && v != seed {
            return v;
        }
        ecc = depth;
        let far = (0..adj.len())
            .filter(|&u| level[u] == depth)
            .min_by_key(|&u| (degree[u], u))
            .unwrap_or(v);
        if far == v {
            return v;
        }
        v = far;
    }
}

/// Cholesky factor of a symmetric positive definite sparse matrix stored as
/// a dense band after reverse Cuthill–McKee reordering.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    perm: Vec<usize>,
    /// Row `i` holds `L[i][i - bw ..= i]`.
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &SparseOperator) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let bw = a
            .triplets()
            .map(|(r, c, _)| inv[r].abs_diff(inv[c]))
            .max()
            .unwrap_or(0);
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for (r, c, v) in a.triplets() {
            let (i, j) = (inv[r], inv[c]);
            if j <= i {
                band[i * w + bw - (i - j)] = v;
            }
        }

        for j in 0..n {
            let lo_j = j.saturating_sub(bw);
            let row_j = j * w + bw - j;
            let mut d = band[row_j + j];
            for k in lo_j..j {
                d -= band[row_j + k] * band[row_j + k];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: perm[j], value: d });
            }
            let d = d.sqrt();
            band[row_j + j] = d;
            for i in j + 1..n.min(j + bw + 1) {
                let row_i = i * w + bw - i;
                let lo = i.saturating_sub(bw).max(lo_j);
                let mut s = band[row_i + j];
                for k in lo..j {
                    s -= band[row_i + k] * band[row_j + k];
                }
                band[row_i + j] = s / d;
            }
        }
        Ok(BandedCholesky { n, bw, perm, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let row = i * w + bw - i;
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[row + k] * y[k];
            }
            y[i] = s / self.band[row + i];
        }
        for i in (0..n).rev() {
            let row = i * w + bw - i;
            y[i] /= self.band[row + i];
            let yi = y[i];
            for k in i.saturating_sub(bw)..i {
                y[k] -= self.band[row + k] * yi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
