//! Single-mode Dicke Hamiltonian in a truncated Fock space, its exact
//! ground state, coupling sweeps, and a Coulomb-gauge single-mode builder
//! with the `(a + a†)²` and dipole-dipole terms kept.
//!
//! Basis index: `spins · (n_max + 1) + n`, where bit `A` of `spins` is set
//! when atom `A` is excited. Spin operators are spin-1/2:
//! `σ_z = diag(+1/2, −1/2)` on (excited, ground), `σ_x` has off-diagonal `1/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electrostatics::DipoleSet;
use crate::error::{Error, Result};
use crate::linalg::{dense_symmetric_eigen, largest_eigenpairs, KrylovOptions, LinearOperator};
use crate::modes::ModeBasis;
use crate::sparse::SparseOperator;

/// Largest admitted Hilbert-space dimension.
pub const MAX_BASIS_DIM: usize = 1 << 20;
/// Dimension up to which the ground state is found by dense diagonalization.
pub const DENSE_DICKE_LIMIT: usize = 512;
/// Cutoff reduction used for the convergence check.
pub const CUTOFF_STEP: usize = 4;
/// `|E₀(n_max) − E₀(n_max − 4)| ≤ CUTOFF_TOL · max(1, |E₀|)`.
pub const CUTOFF_TOL: f64 = 1e-8;
/// Number of lowest levels reported in a [`Spectrum`].
pub const REPORTED_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeAtom {
    pub omega: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParams {
    /// Mode frequency.
    pub omega: f64,
    pub atoms: Vec<DickeAtom>,
    pub n_max: usize,
    /// Drop the counter-rotating terms `a σ₋ + a† σ₊`.
    #[serde(default)]
    pub rotating_wave: bool,
}

impl DickeParams {
    pub fn uniform(atoms: usize, omega: f64, omega_a: f64, g: f64, n_max: usize) -> Self {
        DickeParams {
            omega,
            atoms: vec![DickeAtom { omega: omega_a, g }; atoms],
            n_max,
            rotating_wave: false,
        }
    }

    /// Parameters from mode data: `ω = ω_λ`, `ω_A` from the dipoles, `g_A`
    /// from [`couplings`].
    pub fn from_mode(basis: &ModeBasis, index: usize, dipoles: &DipoleSet, n_max: usize) -> Result<Self> {
        let g = couplings(basis, index, dipoles)?;
        Ok(DickeParams {
            omega: basis.omegas[index],
            atoms: dipoles.atoms.iter().zip(g).map(|(a, g)| DickeAtom { omega: a.omega, g }).collect(),
            n_max,
            rotating_wave: false,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// `2^N (n_max + 1)`, checked against [`MAX_BASIS_DIM`].
    pub fn dim(&self) -> Result<usize> {
        let n = self.atoms.len();
        let dim = if n >= usize::BITS as usize - 1 {
            None
        } else {
            (1usize << n).checked_mul(self.fock_dim())
        };
        match dim {
            Some(d) if d <= MAX_BASIS_DIM => Ok(d),
            _ => Err(Error::DimensionGuard {
                dim: dim.unwrap_or(usize::MAX),
                limit: MAX_BASIS_DIM,
            }),
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParams("mode frequency must be positive".into()));
        }
        if self.atoms.is_empty() {
            return Err(Error::InvalidParams("at least one atom is required".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("photon cutoff must be at least 1".into()));
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if !(a.omega > 0.0 && a.omega.is_finite()) || !a.g.is_finite() {
                return Err(Error::InvalidParams(format!("atom {i}: need ω_A > 0 and finite g")));
            }
        }
        self.dim()
    }

    pub fn with_cutoff(&self, n_max: usize) -> Self {
        DickeParams { n_max, ..self.clone() }
    }

    /// Same atoms with every coupling set to `g`.
    pub fn with_uniform_coupling(&self, g: f64) -> Self {
        let mut p = self.clone();
        p.atoms.iter_mut().for_each(|a| a.g = g);
        p
    }

    pub fn with_scaled_couplings(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.atoms.iter_mut().for_each(|a| a.g *= s);
        p
    }

    /// Root-mean-square coupling.
    pub fn rms_coupling(&self) -> f64 {
        if self.atoms.is_empty() {
            return 0.0;
        }
        (self.atoms.iter().map(|a| a.g * a.g).sum::<f64>() / self.atoms.len() as f64).sqrt()
    }
}

/// `g_A = sqrt(ω_λ/2) · d_A · f_λ(x_A)`.
pub fn couplings(basis: &ModeBasis, index: usize, dipoles: &DipoleSet) -> Result<Vec<f64>> {
    let omega = *basis.omegas.get(index).ok_or(Error::ModeIndex {
        index,
        count: basis.len(),
    })?;
    if omega == 0.0 {
        return Err(Error::ZeroFrequencyMode(index));
    }
    dipoles.locate(basis.grid())?;
    let amp = (omega / 2.0).sqrt();
    dipoles
        .atoms
        .iter()
        .map(|a| {
            let f = basis.eval_at(index, a.position())?;
            Ok(amp * (a.dx * f[0] + a.dy * f[1]))
        })
        .collect()
}

/// The three pieces of the Dicke Hamiltonian; their sum is the Hamiltonian.
#[derive(Debug, Clone)]
pub struct DickeTerms {
    /// `Σ_A ω_A σ_z^A`
    pub atomic: SparseOperator,
    /// `Σ_A g_A (a + a†) σ_x^A`
    pub interaction: SparseOperator,
    /// `ω a†a`
    pub field: SparseOperator,
}

impl DickeTerms {
    pub fn total(&self) -> Result<SparseOperator> {
        self.atomic.add_scaled(&self.interaction, 1.0)?.add_scaled(&self.field, 1.0)
    }
}

fn spin_z(spins: usize, atom: usize) -> f64 {
    if spins >> atom & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

fn diagonal_terms(params: &DickeParams, dim: usize) -> (SparseOperator, SparseOperator) {
    let f = params.fock_dim();
    let mut atomic = Vec::with_capacity(dim);
    let mut field = Vec::with_capacity(dim);
    for idx in 0..dim {
        let (spins, n) = (idx / f, idx % f);
        let e: f64 = params.atoms.iter().enumerate().map(|(a, at)| at.omega * spin_z(spins, a)).sum();
        atomic.push((idx, idx, e));
        field.push((idx, idx, params.omega * n as f64));
    }
    (
        SparseOperator::from_triplets(dim, dim, atomic),
        SparseOperator::from_triplets(dim, dim, field),
    )
}

pub fn build_dicke_terms(params: &DickeParams) -> Result<DickeTerms> {
    let dim = params.validate()?;
    let f = params.fock_dim();
    let (atomic, field) = diagonal_terms(params, dim);
    let mut t = Vec::new();
    for idx in 0..dim {
        let (spins, n) = (idx / f, idx % f);
        for (a, at) in params.atoms.iter().enumerate() {
            if at.g == 0.0 {
                continue;
            }
            let flipped = spins ^ (1 << a);
            let raising = spins >> a & 1 == 0;
            // (a + a†) σ_x: matrix element g/2 · sqrt(n+1) between n and n+1
            if n + 1 < f && !(params.rotating_wave && raising) {
                // a† with the spin flip; RWA keeps a† σ₋ only
                t.push((flipped * f + n + 1, idx, 0.5 * at.g * ((n + 1) as f64).sqrt()));
            }
            if n > 0 && !(params.rotating_wave && !raising) {
                t.push((flipped * f + n - 1, idx, 0.5 * at.g * (n as f64).sqrt()));
            }
        }
    }
    Ok(DickeTerms {
        atomic,
        interaction: SparseOperator::from_triplets(dim, dim, t),
        field,
    })
}

pub fn build_dicke(params: &DickeParams) -> Result<SparseOperator> {
    build_dicke_terms(params)?.total()
}

/// Coulomb-gauge single-mode Hamiltonian at electric-dipole order:
///
/// `Σ_A [ω_A σ_z + u_A i(a − a†) σ_y + v (a + a†)²] + Σ_{A<B} V_AB σ_x σ_x + ω a†a`
///
/// with `u_A` taken from the atoms' `g` field. The `p·A` coupling of the
/// two-level reduction is the `σ_y` quadrature, 90° out of phase with the
/// `σ_x (a + a†)` coupling of the multipolar form; with spin-1/2 operators
/// the product is real symmetric.
pub fn build_minimal_coupling_single_mode(params: &DickeParams, v: f64, dd: &[Vec<f64>]) -> Result<SparseOperator> {
    let dim = params.validate()?;
    let n_atoms = params.n_atoms();
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParams("A-square coefficient must be non-negative".into()));
    }
    if dd.len() != n_atoms || dd.iter().any(|row| row.len() != n_atoms) {
        return Err(Error::InvalidParams(format!("dipole-dipole matrix must be {n_atoms}×{n_atoms}")));
    }
    for a in 0..n_atoms {
        for b in 0..n_atoms {
            if dd[a][b] != dd[b][a] || !dd[a][b].is_finite() {
                return Err(Error::InvalidParams("dipole-dipole matrix must be finite and symmetric".into()));
            }
        }
    }
    let f = params.fock_dim();
    let (atomic, field) = diagonal_terms(params, dim);
    let asq = v * n_atoms as f64;
    let mut t = Vec::new();
    for idx in 0..dim {
        let (spins, n) = (idx / f, idx % f);
        let nf = n as f64;
        // (a + a†)² = a² + a†² + 2n + 1
        if asq != 0.0 {
            t.push((idx, idx, asq * (2.0 * nf + 1.0)));
            if n + 2 < f {
                let m = asq * ((nf + 1.0) * (nf + 2.0)).sqrt();
                t.push((idx + 2, idx, m));
                t.push((idx, idx + 2, m));
            }
        }
        for (a, at) in params.atoms.iter().enumerate() {
            if at.g == 0.0 {
                continue;
            }
            let flipped = (spins ^ (1 << a)) * f;
            // σ_y = −i J with J = [[0, 1/2], [−1/2, 0]] on (excited, ground),
            // i(a − a†) = i K with K = a − a†; the product is K ⊗ J.
            let j = if spins >> a & 1 == 0 { 0.5 } else { -0.5 };
            if n > 0 {
                t.push((flipped + n - 1, idx, at.g * j * nf.sqrt()));
            }
            if n + 1 < f {
                t.push((flipped + n + 1, idx, -at.g * j * (nf + 1.0).sqrt()));
            }
        }
        for a in 0..n_atoms {
            for b in a + 1..n_atoms {
                if dd[a][b] != 0.0 {
                    let flipped = spins ^ (1 << a) ^ (1 << b);
                    t.push((flipped * f + n, idx, 0.25 * dd[a][b]));
                }
            }
        }
    }
    atomic
        .add_scaled(&field, 1.0)?
        .add_scaled(&SparseOperator::from_triplets(dim, dim, t), 1.0)
}

/// Lowest `count` eigenpairs of a symmetric sparse Hamiltonian, ascending.
pub fn lowest_eigenpairs(h: &SparseOperator, count: usize, opts: &KrylovOptions) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = h.nrows();
    let count = count.min(n);
    if n <= DENSE_DICKE_LIMIT {
        let (vals, vecs) = dense_symmetric_eigen(h.to_dense());
        let vectors = (0..count).map(|c| vecs.column(c).iter().copied().collect()).collect();
        return Ok((vals[..count].to_vec(), vectors));
    }
    let reflected = Reflected {
        h,
        c: h.norm_inf(),
    };
    let pairs = largest_eigenpairs(&reflected, count, opts)?;
    let values = pairs.values.iter().map(|t| reflected.c - t).collect();
    Ok((values, pairs.vectors))
}

/// `c I − H`, whose top eigenpairs are the bottom ones of `H`.
struct Reflected<'a> {
    h: &'a SparseOperator,
    c: f64,
}

impl LinearOperator for Reflected<'_> {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.h.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.c * xi - *yi;
        }
    }
}

/// Full ascending spectrum by dense diagonalization.
pub fn full_spectrum(h: &SparseOperator) -> Vec<f64> {
    dense_symmetric_eigen(h.to_dense()).0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundObservables {
    /// `⟨a†a⟩`
    pub photons: f64,
    /// `⟨σ_x^A⟩` per atom.
    pub sigma_x: Vec<f64>,
    /// `⟨a + a†⟩`
    pub field: f64,
}

pub fn observables(params: &DickeParams, psi: &[f64]) -> GroundObservables {
    let f = params.fock_dim();
    let norm2: f64 = psi.iter().map(|x| x * x).sum();
    let mut photons = 0.0;
    let mut field = 0.0;
    let mut sigma_x = vec![0.0; params.n_atoms()];
    for (idx, &c) in psi.iter().enumerate() {
        let (spins, n) = (idx / f, idx % f);
        photons += n as f64 * c * c;
        if n + 1 < f {
            field += 2.0 * ((n + 1) as f64).sqrt() * c * psi[idx + 1];
        }
        for (a, s) in sigma_x.iter_mut().enumerate() {
            *s += 0.5 * c * psi[(spins ^ (1 << a)) * f + n];
        }
    }
    GroundObservables {
        photons: photons / norm2,
        sigma_x: sigma_x.into_iter().map(|s| s / norm2).collect(),
        field: field / norm2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Lowest levels, ascending.
    pub eigenvalues: Vec<f64>,
    pub ground_observables: GroundObservables,
    pub cutoff_converged: bool,
    /// `|E₀(n_max) − E₀(n_max − 4)|`; absent when the cutoff is too small to compare.
    pub cutoff_shift: Option<f64>,
    /// `E₁ − E₀`, the parity-doublet splitting above threshold.
    pub doublet_gap: Option<f64>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

#[derive(Debug, Clone)]
pub struct DickeSolverOptions {
    pub tol: f64,
    pub seed: u64,
    pub levels: usize,
}

impl Default for DickeSolverOptions {
    fn default() -> Self {
        DickeSolverOptions {
            tol: 1e-13,
            seed: 42,
            levels: REPORTED_LEVELS,
        }
    }
}

fn krylov(opts: &DickeSolverOptions) -> KrylovOptions {
    KrylovOptions {
        block: 4,
        max_basis: 200,
        max_iterations: 2000,
        tol: opts.tol,
        seed: opts.seed,
    }
}

pub fn ground_state(params: &DickeParams) -> Result<Spectrum> {
    ground_state_with(params, &DickeSolverOptions::default())
}

/// Lowest levels, ground-state observables, and the cutoff check against a
/// rerun at `n_max − 4`.
pub fn ground_state_with(params: &DickeParams, opts: &DickeSolverOptions) -> Result<Spectrum> {
    params.validate()?;
    let h = build_dicke(params)?;
    let (eigenvalues, vectors) = lowest_eigenpairs(&h, opts.levels.max(2), &krylov(opts))?;
    let e0 = eigenvalues[0];
    let cutoff_shift = if params.n_max > CUTOFF_STEP {
        let coarse = build_dicke(&params.with_cutoff(params.n_max - CUTOFF_STEP))?;
        let (ev, _) = lowest_eigenpairs(&coarse, 1, &krylov(opts))?;
        Some((e0 - ev[0]).abs())
    } else {
        None
    };
    let cutoff_converged = cutoff_shift.is_some_and(|s| s <= CUTOFF_TOL * e0.abs().max(1.0));
    Ok(Spectrum {
        doublet_gap: eigenvalues.get(1).map(|e1| e1 - e0),
        ground_observables: observables(params, &vectors[0]),
        eigenvalues: eigenvalues.into_iter().take(opts.levels.max(1)).collect(),
        cutoff_converged,
        cutoff_shift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: f64,
    pub e0_per_atom: f64,
    pub photons_per_atom: f64,
    pub converged: bool,
}

fn sweep_row(g: f64, params: &DickeParams, opts: &DickeSolverOptions) -> SweepRow {
    let n = params.n_atoms() as f64;
    match ground_state_with(params, opts) {
        Ok(s) => SweepRow {
            g,
            e0_per_atom: s.ground_energy() / n,
            photons_per_atom: s.ground_observables.photons / n,
            converged: s.cutoff_converged,
        },
        Err(_) => SweepRow {
            g,
            e0_per_atom: f64::NAN,
            photons_per_atom: f64::NAN,
            converged: false,
        },
    }
}

/// Ground data with every coupling set to each `g` in turn. Failed points
/// are reported as non-converged rows.
pub fn sweep_coupling(params: &DickeParams, g_values: &[f64], opts: &DickeSolverOptions) -> Result<Vec<SweepRow>> {
    params.validate()?;
    Ok(g_values
        .par_iter()
        .map(|&g| sweep_row(g, &params.with_uniform_coupling(g), opts))
        .collect())
}

/// Ground data with the couplings scaled by each factor; the `g` column is
/// the scaled RMS coupling.
pub fn sweep_scaled(params: &DickeParams, scales: &[f64], opts: &DickeSolverOptions) -> Result<Vec<SweepRow>> {
    params.validate()?;
    let g = params.rms_coupling();
    Ok(scales
        .par_iter()
        .map(|&s| sweep_row(s * g, &params.with_scaled_couplings(s), opts))
        .collect())
}

/// Mean-field threshold `sqrt(ω ω_A / N)` for identical atoms.
pub fn critical_coupling(omega: f64, omega_a: f64, atoms: usize) -> f64 {
    (omega * omega_a / atoms as f64).sqrt()
}

/// Minimum over real `α` of `ω α² − Σ_A sqrt(ω_A²/4 + g_A² α²)`; returns
/// `(energy, α)`.
pub fn mean_field_ground(params: &DickeParams) -> (f64, f64) {
    let energy = |alpha: f64| {
        params.omega * alpha * alpha
            - params
                .atoms
                .iter()
                .map(|a| (0.25 * a.omega * a.omega + a.g * a.g * alpha * alpha).sqrt())
                .sum::<f64>()
    };
    // stationarity for α > 0: 2ω = Σ g² / sqrt(ω_A²/4 + g² α²), decreasing in α
    let slope = |alpha: f64| {
        2.0 * params.omega
            - params
                .atoms
                .iter()
                .map(|a| a.g * a.g / (0.25 * a.omega * a.omega + a.g * a.g * alpha * alpha).sqrt())
                .sum::<f64>()
    };
    if slope(0.0) >= 0.0 {
        return (energy(0.0), 0.0);
    }
    let mut hi = 1.0;
    while slope(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    (energy(alpha), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_spectrum() {
        let p = DickeParams::uniform(1, 1.0, 0.7, 0.0, 6);
        let mut expect: Vec<f64> = (0..=6).flat_map(|n| [n as f64 - 0.35, n as f64 + 0.35]).collect();
        expect.sort_by(f64::total_cmp);
        let got = full_spectrum(&build_dicke(&p).unwrap());
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_exactly() {
        let p = DickeParams::uniform(3, 1.0, 1.3, 0.4, 8);
        assert_eq!(build_dicke(&p).unwrap().asymmetry(), 0.0);
        let dd = vec![vec![0.0, 0.1, 0.2], vec![0.1, 0.0, -0.3], vec![0.2, -0.3, 0.0]];
        assert_eq!(build_minimal_coupling_single_mode(&p, 0.2, &dd).unwrap().asymmetry(), 0.0);
    }

    #[test]
    fn terms_sum_to_hamiltonian() {
        let p = DickeParams {
            omega: 1.1,
            atoms: vec![DickeAtom { omega: 0.9, g: 0.3 }, DickeAtom { omega: 1.2, g: -0.2 }],
            n_max: 5,
            rotating_wave: false,
        };
        let terms = build_dicke_terms(&p).unwrap();
        let h = build_dicke(&p).unwrap();
        let sum = terms.total().unwrap();
        assert_eq!(sum.to_dense(), h.to_dense());
        let atomic_only = build_dicke(&p.with_uniform_coupling(0.0)).unwrap();
        let diag = terms.atomic.add_scaled(&terms.field, 1.0).unwrap();
        assert_eq!(diag.to_dense(), atomic_only.to_dense());
    }

    #[test]
    fn rotating_wave_conserves_excitations() {
        let mut p = DickeParams::uniform(2, 1.0, 1.0, 0.3, 6);
        p.rotating_wave = true;
        let h = build_dicke(&p).unwrap();
        let f = p.fock_dim();
        for (r, c, _) in h.triplets() {
            let exc = |i: usize| (i / f).count_ones() as usize + i % f;
            assert_eq!(exc(r), exc(c));
        }
    }

    #[test]
    fn vacuum_at_zero_coupling() {
        let s = ground_state(&DickeParams::uniform(2, 1.0, 1.0, 0.0, 10)).unwrap();
        assert_eq!(s.ground_observables.photons, 0.0);
        assert!((s.ground_energy() + 1.0).abs() < 1e-13);
        assert!(s.cutoff_converged);
    }

    #[test]
    fn parity_below_threshold() {
        let p = DickeParams::uniform(2, 1.0, 1.0, 0.3, 30);
        let s = ground_state(&p).unwrap();
        assert!(s.ground_observables.field.abs() < 1e-8);
        assert!(s.ground_observables.sigma_x.iter().all(|x| x.abs() < 1e-8));
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        // 2^4 · 41 = 656 > dense limit
        let p = DickeParams::uniform(4, 1.0, 1.0, 0.7, 40);
        let h = build_dicke(&p).unwrap();
        assert!(h.nrows() > DENSE_DICKE_LIMIT);
        let (vals, _) = lowest_eigenpairs(&h, 4, &krylov(&DickeSolverOptions::default())).unwrap();
        let dense = full_spectrum(&h);
        for (a, b) in vals.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn cutoff_check() {
        let tight = ground_state(&DickeParams::uniform(1, 1.0, 1.0, 0.2, 30)).unwrap();
        assert!(tight.cutoff_converged);
        let loose = ground_state(&DickeParams::uniform(2, 1.0, 1.0, 1.5, 6)).unwrap();
        assert!(!loose.cutoff_converged);
        let tiny = ground_state(&DickeParams::uniform(1, 1.0, 1.0, 0.2, 3)).unwrap();
        assert!(!tiny.cutoff_converged && tiny.cutoff_shift.is_none());
    }

    #[test]
    fn mean_field_threshold_and_bound() {
        let gc = critical_coupling(1.0, 1.0, 2);
        let below = mean_field_ground(&DickeParams::uniform(2, 1.0, 1.0, 0.9 * gc, 1));
        assert_eq!(below.1, 0.0);
        assert_eq!(below.0, -1.0);
        let above = mean_field_ground(&DickeParams::uniform(2, 1.0, 1.0, 1.5 * gc, 1));
        assert!(above.1 > 0.0 && above.0 < -1.0);
        for g in [0.2, 0.6, 1.0, 1.4] {
            let p = DickeParams::uniform(2, 1.0, 1.0, g, 40);
            let exact = ground_state(&p).unwrap().ground_energy();
            assert!(mean_field_ground(&p).0 >= exact - 1e-9);
        }
    }

    #[test]
    fn sweep_is_monotone_for_two_atoms() {
        let p = DickeParams::uniform(2, 1.0, 1.0, 0.0, 40);
        let g: Vec<f64> = (0..12).map(|i| 0.1 * i as f64).collect();
        let rows = sweep_coupling(&p, &g, &DickeSolverOptions::default()).unwrap();
        assert_eq!(rows[0].photons_per_atom, 0.0);
        for w in rows.windows(2) {
            assert!(w[1].photons_per_atom >= w[0].photons_per_atom - 1e-8);
        }
        assert!(rows.iter().all(|r| r.converged));
    }

    #[test]
    fn minimal_coupling_matches_dicke_without_extra_terms() {
        let p = DickeParams::uniform(1, 1.0, 1.2, 0.15, 25);
        let a = full_spectrum(&build_dicke(&p).unwrap());
        let b = full_spectrum(&build_minimal_coupling_single_mode(&p, 0.0, &[vec![0.0]]).unwrap());
        for (x, y) in a.iter().zip(&b).take(20) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn bogoliubov_frequency() {
        let p = DickeParams::uniform(1, 1.0, 3.0, 0.0, 60);
        let v = 0.25;
        let e = full_spectrum(&build_minimal_coupling_single_mode(&p, v, &[vec![0.0]]).unwrap());
        let eps = (1.0f64 * (1.0 + 4.0 * v)).sqrt();
        assert!((e[1] - e[0] - eps).abs() < 1e-8);
        assert!((e[0] - (-1.5 + (eps - 1.0) / 2.0)).abs() < 1e-8);
    }

    #[test]
    fn validation() {
        assert!(DickeParams::uniform(0, 1.0, 1.0, 0.1, 5).validate().is_err());
        assert!(DickeParams::uniform(1, 0.0, 1.0, 0.1, 5).validate().is_err());
        assert!(DickeParams::uniform(1, 1.0, 1.0, 0.1, 0).validate().is_err());
        assert!(matches!(
            DickeParams::uniform(20, 1.0, 1.0, 0.1, 3).validate(),
            Err(Error::DimensionGuard { .. })
        ));
        assert!(serde_json::from_str::<DickeParams>(r#"{"omega":1,"atoms":[],"n_max":3,"extra":1}"#).is_err());
    }
}
