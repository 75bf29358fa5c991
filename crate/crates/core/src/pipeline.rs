//! End-to-end run: grid → modes → coulomb → couplings → dicke, with a
//! manifest recording every check, tolerance, constant and output checksum.
//!
//! Outputs carry no timestamps or paths, so identical inputs reproduce the
//! artifact directory byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dicke::{self, DickeParams, DickeSolverOptions};
use crate::electrostatics::{energy_report_with, verify_polarization_with, DipoleSet};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, DomainSpec, Grid};
use crate::hodge::{self, curl_div_norms, harmonic_basis_seeded, max_principal_angle, Hodge};
use crate::io::{fmt_f64, write_csv, write_json, Array};
use crate::modes::{self, orthonormality_defect, transverse_modes_with, ModeBasis, ModeOptions};
use crate::operators::DiscreteOperators;

pub const MANIFEST_FORMAT: u32 = 1;
pub const DEFAULT_N_MAX: usize = 20;
pub const DEFAULT_SEED: u64 = 42;

/// Pipeline configuration file. Relative paths resolve against the file's
/// directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub domain: PathBuf,
    pub dipoles: PathBuf,
    /// Index into the mode basis, zero-frequency modes included.
    pub mode: usize,
    /// Coupling scale factors for the sweep; defaults to `[1.0]`.
    #[serde(default = "unit_scale")]
    pub g_scales: Vec<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Number of modes to compute; defaults to `mode + 4`.
    #[serde(default)]
    pub mode_count: Option<usize>,
    /// Eigensolver tolerance override.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn unit_scale() -> Vec<f64> {
    vec![1.0]
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.domain, &mut cfg.dipoles] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn inputs(&self) -> Result<PipelineInputs> {
        Ok(PipelineInputs {
            domain: DomainSpec::from_json(&std::fs::read_to_string(&self.domain)?)?,
            dipoles: DipoleSet::from_json(&std::fs::read_to_string(&self.dipoles)?)?,
            mode: self.mode,
            g_scales: self.g_scales.clone(),
            n_max: self.n_max.unwrap_or(DEFAULT_N_MAX),
            mode_count: self.mode_count,
            tol: self.tol,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Parsed pipeline inputs; recorded verbatim in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineInputs {
    pub domain: DomainSpec,
    pub dipoles: DipoleSet,
    pub mode: usize,
    pub g_scales: Vec<f64>,
    pub n_max: usize,
    pub mode_count: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Enforced checks abort the stage when they fail; the others are flags.
    pub enforced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: String,
    pub checks: Vec<Check>,
    pub outputs: Vec<OutputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub inputs: PipelineInputs,
    pub constants: BTreeMap<String, f64>,
    pub stages: Vec<StageRecord>,
    pub completed: bool,
}

impl Manifest {
    pub fn all_checks_passed(&self) -> bool {
        self.stages.iter().all(|s| s.checks.iter().all(|c| c.passed))
    }
}

fn constants(mode_tol: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("epsilon_0".to_string(), crate::EPSILON_0),
        ("speed_of_light".to_string(), crate::SPEED_OF_LIGHT),
        ("gradient_shift_sigma".to_string(), ModeOptions::default().sigma),
        ("eigensolver_tol".to_string(), mode_tol),
        ("zero_eigenvalue_rel".to_string(), hodge::ZERO_EIGEN_REL),
        ("poisson_rel_tol".to_string(), hodge::POISSON_REL_TOL),
        ("poisson_accept_tol".to_string(), hodge::POISSON_ACCEPT_TOL),
        ("mode_residual_tol".to_string(), modes::MODE_RESIDUAL_TOL),
        ("degeneracy_rel".to_string(), modes::DEGENERACY_REL),
        ("dicke_cutoff_step".to_string(), dicke::CUTOFF_STEP as f64),
        ("dicke_cutoff_tol".to_string(), dicke::CUTOFF_TOL),
        ("dicke_max_basis_dim".to_string(), dicke::MAX_BASIS_DIM as f64),
        ("min_atom_separation_h".to_string(), 4.0),
        ("min_wall_distance_h".to_string(), 2.0),
    ])
}

struct Stage<'a> {
    dir: &'a Path,
    record: StageRecord,
}

impl<'a> Stage<'a> {
    fn new(dir: &'a Path, name: &str) -> Self {
        Stage {
            dir,
            record: StageRecord {
                name: name.to_string(),
                status: "ok".to_string(),
                checks: vec![],
                outputs: vec![],
                error: None,
            },
        }
    }

    fn check(&mut self, name: &str, value: f64, tolerance: f64) -> Result<()> {
        self.record_check(name, value, tolerance, true)
    }

    fn record_check(&mut self, name: &str, value: f64, tolerance: f64, enforced: bool) -> Result<()> {
        let passed = value <= tolerance;
        self.record.checks.push(Check {
            name: name.to_string(),
            value,
            tolerance,
            passed,
            enforced,
        });
        if enforced && !passed {
            return Err(Error::CheckFailed {
                check: name.to_string(),
                value,
                tolerance,
            });
        }
        Ok(())
    }

    fn output(&mut self, file: &str) -> Result<()> {
        let bytes = std::fs::read(self.dir.join(file))?;
        self.record.outputs.push(OutputRecord {
            file: file.to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }
}

/// Counts and topology of a grid, as written by the grid stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub holes: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub dof_vertices: usize,
    pub dof_edges: usize,
    pub inside_faces: usize,
    pub euler_characteristic: i64,
    pub boundary_components: usize,
}

pub fn grid_summary(grid: &Grid) -> GridSummary {
    GridSummary {
        nx: grid.nx(),
        ny: grid.ny(),
        h: grid.h(),
        holes: grid.hole_count(),
        vertices: grid.n_vertices(),
        edges: grid.n_edges(),
        faces: grid.n_faces(),
        dof_vertices: grid.dof_vertices().len(),
        dof_edges: grid.dof_edges().len(),
        inside_faces: grid.inside_faces().len(),
        euler_characteristic: grid.euler_characteristic(),
        boundary_components: grid.boundary_components(),
    }
}

/// `max |C G|` and `max |D + Gᵀ|` entrywise.
pub fn identity_defects(ops: &DiscreteOperators) -> Result<(f64, f64)> {
    let cg = ops.curl.matmul(&ops.grad)?;
    let cg_max = cg.triplets().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()));
    let sum = ops.div.add_scaled(&ops.grad.transpose(), 1.0)?;
    let d_max = sum.triplets().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()));
    Ok((cg_max, d_max))
}

/// Runs every stage into `out`, writing `manifest.json` last. On failure the
/// partial manifest is still written and the error names the stage.
pub fn run_pipeline(inputs: &PipelineInputs, out: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out)?;
    let mode_opts = ModeOptions {
        tol: inputs.tol.unwrap_or(ModeOptions::default().tol),
        seed: inputs.seed,
        ..ModeOptions::default()
    };
    let mut manifest = Manifest {
        format: MANIFEST_FORMAT,
        inputs: inputs.clone(),
        constants: constants(mode_opts.tol),
        stages: vec![],
        completed: false,
    };
    let result = run_stages(inputs, out, &mode_opts, &mut manifest.stages);
    manifest.completed = result.is_ok();
    write_json(&out.join("manifest.json"), &manifest)?;
    result.map(|_| manifest)
}

fn run_stages(inputs: &PipelineInputs, out: &Path, mode_opts: &ModeOptions, records: &mut Vec<StageRecord>) -> Result<()> {
    let mut state = State::default();
    type StageFn = fn(&PipelineInputs, &ModeOptions, &mut State, &mut Stage<'_>) -> Result<()>;
    let stages: [(&'static str, StageFn); 5] = [
        ("grid", stage_grid),
        ("modes", stage_modes),
        ("coulomb", stage_coulomb),
        ("couplings", stage_couplings),
        ("dicke", stage_dicke),
    ];
    for (name, run) in stages {
        let mut stage = Stage::new(out, name);
        let result = run(inputs, mode_opts, &mut state, &mut stage);
        if let Err(e) = &result {
            stage.record.status = "failed".to_string();
            stage.record.error = Some(e.to_string());
        }
        records.push(stage.record);
        result.map_err(|e| Error::Stage {
            stage: name,
            source: Box::new(e),
        })?;
    }
    Ok(())
}

#[derive(Default)]
struct State {
    ops: Option<DiscreteOperators>,
    modes: Option<ModeBasis>,
    couplings: Vec<f64>,
}

fn stage_grid(inputs: &PipelineInputs, _: &ModeOptions, state: &mut State, stage: &mut Stage<'_>) -> Result<()> {
    let grid = build_grid(&inputs.domain)?;
    write_json(&stage.path("grid.json"), &grid_summary(&grid))?;
    stage.output("grid.json")?;
    let ops = DiscreteOperators::new(grid);
    let (cg, d) = identity_defects(&ops)?;
    stage.check("curl_grad_max_abs", cg, 0.0)?;
    stage.check("div_plus_grad_transpose_max_abs", d, 0.0)?;
    let chi = ops.grid.euler_characteristic();
    stage.check(
        "euler_characteristic_defect",
        (chi - (1 - ops.grid.hole_count() as i64)).unsigned_abs() as f64,
        0.0,
    )?;
    state.ops = Some(ops);
    Ok(())
}

fn stage_modes(inputs: &PipelineInputs, opts: &ModeOptions, state: &mut State, stage: &mut Stage<'_>) -> Result<()> {
    let ops = state.ops.as_ref().expect("grid stage ran");
    let k = inputs.mode_count.unwrap_or(inputs.mode + 4).max(inputs.mode + 1);
    let basis = transverse_modes_with(ops, k, opts)?;
    let harmonic = harmonic_basis_seeded(ops, opts.seed)?;

    let rows: Vec<Vec<String>> = basis
        .omegas
        .iter()
        .enumerate()
        .map(|(i, w)| vec![i.to_string(), fmt_f64(*w)])
        .collect();
    write_csv(&stage.path("omegas.csv"), &["index", "omega"], &rows)?;
    stage.output("omegas.csv")?;
    let vectors: Vec<&[f64]> = basis.vectors.iter().map(|v| v.values()).collect();
    Array::from_rows(&vectors)?.save(&stage.path("modes.bin"))?;
    stage.output("modes.bin")?;

    let residual = basis.residuals.iter().fold(0.0f64, |m, &r| m.max(r));
    stage.check("max_mode_residual", residual, modes::MODE_RESIDUAL_TOL)?;
    stage.check("orthonormality_defect", orthonormality_defect(&basis.vectors)?, 1e-10)?;
    let div = basis.vectors.iter().fold(0.0f64, |m, v| m.max(curl_div_norms(ops, v).1));
    stage.check("max_mode_divergence", div, 1e-8)?;
    let zero_in_range = basis.zero_mode_count < basis.len();
    if zero_in_range {
        // every zero mode fits in the computed range: counts must agree
        stage.check(
            "zero_modes_minus_harmonic_dimension",
            basis.zero_mode_count.abs_diff(harmonic.dimension()) as f64,
            0.0,
        )?;
        stage.check(
            "zero_mode_harmonic_principal_angle",
            max_principal_angle(basis.zero_modes(), &harmonic.vectors)?,
            1e-8,
        )?;
    }
    state.modes = Some(basis);
    Ok(())
}

#[derive(Serialize)]
struct CoulombOutput<'a> {
    report: &'a crate::electrostatics::EnergyReport,
    cancellation_residual: f64,
    pythagoras_residual: f64,
    coulomb_residual: f64,
    bilinearity_residual: f64,
    divergence_residual: f64,
    projector_residual: f64,
}

fn stage_coulomb(inputs: &PipelineInputs, _: &ModeOptions, state: &mut State, stage: &mut Stage<'_>) -> Result<()> {
    let ops = state.ops.as_ref().expect("grid stage ran");
    let hodge = Hodge::new(ops)?;
    let report = energy_report_with(&hodge, &inputs.dipoles)?;
    let pol = verify_polarization_with(&hodge, &inputs.dipoles)?;
    let out = CoulombOutput {
        report: &report,
        cancellation_residual: report.cancellation_residual(),
        pythagoras_residual: report.pythagoras_residual(),
        coulomb_residual: report.coulomb_residual(),
        bilinearity_residual: report.bilinearity_residual(),
        divergence_residual: pol.divergence_residual,
        projector_residual: pol.projector_residual,
    };
    write_json(&stage.path("energy.json"), &out)?;
    stage.output("energy.json")?;
    stage.check("cancellation_residual", out.cancellation_residual, 1e-8)?;
    stage.check("pythagoras_residual", out.pythagoras_residual, 1e-10)?;
    stage.check("coulomb_residual", out.coulomb_residual, 1e-8)?;
    stage.check("bilinearity_residual", out.bilinearity_residual, 1e-10)?;
    stage.check("divergence_residual", out.divergence_residual, 1e-13)?;
    stage.check("projector_residual", out.projector_residual, 1e-10)?;
    Ok(())
}

fn stage_couplings(inputs: &PipelineInputs, _: &ModeOptions, state: &mut State, stage: &mut Stage<'_>) -> Result<()> {
    let basis = state.modes.as_ref().expect("modes stage ran");
    let g = dicke::couplings(basis, inputs.mode, &inputs.dipoles)?;
    let rows: Vec<Vec<String>> = inputs
        .dipoles
        .atoms
        .iter()
        .zip(&g)
        .enumerate()
        .map(|(i, (a, g))| {
            vec![
                i.to_string(),
                fmt_f64(a.x),
                fmt_f64(a.y),
                fmt_f64(a.dx),
                fmt_f64(a.dy),
                fmt_f64(a.omega),
                fmt_f64(*g),
            ]
        })
        .collect();
    write_csv(
        &stage.path("couplings.csv"),
        &["atom", "x", "y", "dx", "dy", "omega_a", "g"],
        &rows,
    )?;
    stage.output("couplings.csv")?;
    state.couplings = g;
    Ok(())
}

fn stage_dicke(inputs: &PipelineInputs, opts: &ModeOptions, state: &mut State, stage: &mut Stage<'_>) -> Result<()> {
    let basis = state.modes.as_ref().expect("modes stage ran");
    let params = DickeParams {
        omega: basis.omegas[inputs.mode],
        atoms: inputs
            .dipoles
            .atoms
            .iter()
            .zip(&state.couplings)
            .map(|(a, &g)| dicke::DickeAtom { omega: a.omega, g })
            .collect(),
        n_max: inputs.n_max,
        rotating_wave: false,
    };
    let solver = DickeSolverOptions {
        seed: opts.seed,
        ..DickeSolverOptions::default()
    };
    let rows = dicke::sweep_scaled(&params, &inputs.g_scales, &solver)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.g),
                fmt_f64(r.e0_per_atom),
                fmt_f64(r.photons_per_atom),
                r.converged.to_string(),
            ]
        })
        .collect();
    write_csv(
        &stage.path("sweep.csv"),
        &["g", "E0_per_atom", "photons_per_atom", "converged"],
        &table,
    )?;
    stage.output("sweep.csv")?;
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    stage.record_check("unconverged_rows", unconverged as f64, 0.0, false)?;
    Ok(())
}
