//! Point-dipole polarization fields and the longitudinal/transverse energy
//! bookkeeping that underlies the A-square and dipole-dipole cancellation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EdgePair, Grid};
use crate::hodge::Hodge;
use crate::operators::{inner, DiscreteOperators, FieldVector};
use crate::EPSILON_0;

/// One two-level atom: position, transition dipole moment and frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
    pub omega: f64,
}

impl Atom {
    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn moment(&self) -> [f64; 2] {
        [self.dx, self.dy]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleSet {
    pub atoms: Vec<Atom>,
}

impl DipoleSet {
    pub fn new(atoms: Vec<Atom>) -> Self {
        DipoleSet { atoms }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Checks the placement rules and returns the edges each atom snaps to.
    pub fn locate(&self, grid: &Grid) -> Result<Vec<EdgePair>> {
        let h = grid.h();
        for (i, a) in self.atoms.iter().enumerate() {
            if ![a.x, a.y, a.dx, a.dy, a.omega].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParams(format!("atom {i} has a non-finite entry")));
            }
            if !(a.omega > 0.0) {
                return Err(Error::InvalidParams(format!("atom {i} needs a positive transition frequency")));
            }
            for (j, b) in self.atoms.iter().enumerate().take(i) {
                let d = (a.x - b.x).hypot(a.y - b.y);
                if d < 4.0 * h * (1.0 - 1e-12) {
                    return Err(Error::Placement {
                        x: a.x,
                        y: a.y,
                        reason: format!("closer than 4 grid spacings to atom {j}"),
                    });
                }
            }
        }
        self.atoms.iter().map(|a| grid.locate(a.position())).collect()
    }
}

/// Single-atom polarization: `d_x/h²` on the located x-edge and `d_y/h²` on
/// the located y-edge, so that `∫ P_A = d_A`.
fn atom_field(grid: &Grid, atom: &Atom, pair: EdgePair) -> FieldVector {
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut p = FieldVector::zeros(grid);
    p.values_mut()[pair.x_dof] = atom.dx * inv_h2;
    p.values_mut()[pair.y_dof] = atom.dy * inv_h2;
    p
}

/// Per-atom polarization fields `P_A`.
pub fn atom_polarizations(dipoles: &DipoleSet, grid: &Grid) -> Result<Vec<FieldVector>> {
    let pairs = dipoles.locate(grid)?;
    Ok(dipoles
        .atoms
        .iter()
        .zip(pairs)
        .map(|(a, pair)| atom_field(grid, a, pair))
        .collect())
}

/// `P = Σ_A P_A`.
pub fn dipole_polarization(dipoles: &DipoleSet, grid: &Grid) -> Result<FieldVector> {
    let mut p = FieldVector::zeros(grid);
    for pa in atom_polarizations(dipoles, grid)? {
        p = p.add(&pa)?;
    }
    Ok(p)
}

/// Bound charge `ρ = −div0 P` on interior vertices.
pub fn charge_density(ops: &DiscreteOperators, p: &FieldVector) -> Vec<f64> {
    ops.div_of(p).into_iter().map(|v| -v).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub first: usize,
    pub second: usize,
    pub value: f64,
}

/// Electrostatic energy functionals of a polarization field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `∫P²/(2ε₀)`
    pub total: f64,
    /// `∫(QP)²/(2ε₀)`
    pub longitudinal: f64,
    /// `∫(RP)²/(2ε₀)`
    pub transverse: f64,
    /// `ε₀/2 ∫(∇U)²` with `U` solved from `ρ = −div P`
    pub coulomb_direct: f64,
    pub self_energies: Vec<f64>,
    pub cross_terms: Vec<PairTerm>,
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

impl EnergyReport {
    /// `|ε₀/2∫(∇U)² + ∫(RP)²/(2ε₀) − ∫P²/(2ε₀)| / ∫P²/(2ε₀)`
    pub fn cancellation_residual(&self) -> f64 {
        rel(self.coulomb_direct + self.transverse, self.total, self.total)
    }

    pub fn pythagoras_residual(&self) -> f64 {
        rel(self.longitudinal + self.transverse, self.total, self.total)
    }

    pub fn coulomb_residual(&self) -> f64 {
        rel(self.coulomb_direct, self.longitudinal, self.longitudinal)
    }

    pub fn bilinearity_residual(&self) -> f64 {
        let sum = self.self_energies.iter().sum::<f64>() + self.cross_terms.iter().map(|t| t.value).sum::<f64>();
        rel(sum, self.longitudinal, self.longitudinal)
    }
}

pub fn energy_report(dipoles: &DipoleSet, ops: &DiscreteOperators) -> Result<EnergyReport> {
    energy_report_with(&Hodge::new(ops)?, dipoles)
}

pub fn energy_report_with(hodge: &Hodge<'_>, dipoles: &DipoleSet) -> Result<EnergyReport> {
    let ops = hodge.operators();
    let grid = &ops.grid;
    let parts = atom_polarizations(dipoles, grid)?;
    let mut p = FieldVector::zeros(grid);
    for pa in &parts {
        p = p.add(pa)?;
    }
    let split = hodge.project_q(&p)?;
    let rho = charge_density(ops, &p);
    let u = hodge.poisson_dirichlet(&rho)?;
    let grad_u = ops.grad_of(&u);

    let longitudinal_parts: Vec<FieldVector> = parts
        .par_iter()
        .map(|pa| hodge.project_q(pa).map(|s| s.gradient_part))
        .collect::<Result<_>>()?;
    let self_energies = longitudinal_parts
        .iter()
        .map(|q| Ok(inner(q, q)? / (2.0 * EPSILON_0)))
        .collect::<Result<Vec<_>>>()?;
    let mut cross_terms = Vec::new();
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            cross_terms.push(PairTerm {
                first: a,
                second: b,
                value: inner(&longitudinal_parts[a], &longitudinal_parts[b])? / EPSILON_0,
            });
        }
    }
    Ok(EnergyReport {
        total: inner(&p, &p)? / (2.0 * EPSILON_0),
        longitudinal: inner(&split.gradient_part, &split.gradient_part)? / (2.0 * EPSILON_0),
        transverse: inner(&split.divfree_part, &split.divfree_part)? / (2.0 * EPSILON_0),
        coulomb_direct: 0.5 * EPSILON_0 * inner(&grad_u, &grad_u)?,
        self_energies,
        cross_terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationResiduals {
    /// `max |div P + ρ|` with `ρ` assembled directly from the charge pairs.
    pub divergence_residual: f64,
    /// `max |div(QP) − div P|`.
    pub projector_residual: f64,
}

/// Charge pairs `±d/h` per located edge, divided by the cell area.
fn charge_pairs(grid: &Grid, dipoles: &DipoleSet, pairs: &[EdgePair]) -> Vec<f64> {
    let h = grid.h();
    let mut rho = vec![0.0; grid.dof_vertices().len()];
    for (a, pair) in dipoles.atoms.iter().zip(pairs) {
        for (edge, d) in [(pair.x_edge, a.dx), (pair.y_edge, a.dy)] {
            let q = d / h / (h * h);
            let (tail, head) = grid.edge_vertices(edge);
            if let Some(k) = grid.vertex_dof(head) {
                rho[k] += q;
            }
            if let Some(k) = grid.vertex_dof(tail) {
                rho[k] -= q;
            }
        }
    }
    rho
}

pub fn verify_polarization(dipoles: &DipoleSet, ops: &DiscreteOperators) -> Result<PolarizationResiduals> {
    verify_polarization_with(&Hodge::new(ops)?, dipoles)
}

pub fn verify_polarization_with(hodge: &Hodge<'_>, dipoles: &DipoleSet) -> Result<PolarizationResiduals> {
    let ops = hodge.operators();
    let grid = &ops.grid;
    let pairs = dipoles.locate(grid)?;
    let p = dipole_polarization(dipoles, grid)?;
    let rho = charge_pairs(grid, dipoles, &pairs);
    let div_p = ops.div_of(&p);
    let div_qp = ops.div_of(&hodge.project_q(&p)?.gradient_part);
    let max_abs = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PolarizationResiduals {
        divergence_residual: max_abs(&mut div_p.iter().zip(&rho).map(|(d, r)| d + r)),
        projector_residual: max_abs(&mut div_qp.iter().zip(&div_p).map(|(a, b)| a - b)),
    })
}
