//! `cavity`: command-line driver for the cavity toolkit.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_core::dicke::{self, DickeParams, DickeSolverOptions};
use cavity_core::electrostatics::{energy_report_with, verify_polarization_with, DipoleSet};
use cavity_core::hodge::{harmonic_basis_seeded, Hodge};
use cavity_core::io::{fmt_f64, write_csv, write_json, Array};
use cavity_core::modes::{transverse_modes_with, ModeOptions};
use cavity_core::pipeline::{grid_summary, run_pipeline, PipelineConfig, PipelineInputs, DEFAULT_N_MAX, DEFAULT_SEED};
use cavity_core::{build_grid, inner, DiscreteOperators, DomainSpec, Error, FieldVector, Result};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cavity", version, about = "Hodge decomposition, cavity modes and Dicke reduction on 2D conductor domains")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random inputs and iterative solver start vectors [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Eigensolver convergence tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the grid and report counts and topology.
    Grid {
        #[arg(long)]
        domain: PathBuf,
        /// Directory for grid.json (and operator dumps); stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write grad0.txt, curl.txt and div0.txt triplet dumps.
        #[arg(long, requires = "out")]
        dump_operators: bool,
    },
    /// Split a field into its gradient and divergence-free parts.
    Hodge {
        #[arg(long)]
        domain: PathBuf,
        /// Rank-1 array over interior edges; a seeded random field if absent.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lowest transverse modes.
    Modes {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Electrostatic energies of a dipole configuration.
    Coulomb {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        dipoles: PathBuf,
        /// Directory for energy.json; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground state of a Dicke model, optionally swept over a uniform coupling.
    Dicke {
        #[arg(long)]
        params: PathBuf,
        /// Overrides the photon cutoff of the parameter file.
        #[arg(long)]
        nmax: Option<usize>,
        /// Comma-separated coupling values for a sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full chain grid → modes → coulomb → couplings → dicke.
    Pipeline {
        /// JSON configuration; individual flags override its entries.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long)]
        dipoles: Option<PathBuf>,
        /// Mode index, zero-frequency modes included.
        #[arg(long)]
        mode: Option<usize>,
        /// Comma-separated coupling scale factors.
        #[arg(long, value_delimiter = ',')]
        g_scales: Option<Vec<f64>>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 3 } else { 2 })
        }
    }
}

fn load_domain(path: &Path) -> Result<DomainSpec> {
    DomainSpec::from_json(&std::fs::read_to_string(path)?)
}

fn load_dipoles(path: &Path) -> Result<DipoleSet> {
    DipoleSet::from_json(&std::fs::read_to_string(path)?)
}

fn operators(domain: &Path) -> Result<DiscreteOperators> {
    Ok(DiscreteOperators::new(build_grid(&load_domain(domain)?)?))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn mode_options(cli: &Cli) -> ModeOptions {
    let d = ModeOptions::default();
    ModeOptions {
        tol: cli.tol.unwrap_or(d.tol),
        seed: cli.seed(),
        ..d
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Grid {
            domain,
            out,
            dump_operators,
        } => {
            let ops = operators(domain)?;
            let summary = serde_json::to_value(grid_summary(&ops.grid))?;
            match out {
                None => print_json(&summary),
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    write_json(&dir.join("grid.json"), &summary)?;
                    if *dump_operators {
                        for (name, op) in [("grad0.txt", &ops.grad), ("curl.txt", &ops.curl), ("div0.txt", &ops.div)] {
                            op.write_triplets(BufWriter::new(File::create(dir.join(name))?))?;
                        }
                    }
                    Ok(())
                }
            }
        }
        Command::Hodge { domain, field, out } => {
            let ops = operators(domain)?;
            let n = ops.grid.dof_edges().len();
            let values = match field {
                Some(path) => {
                    let a = Array::load(path)?;
                    if a.dims != [n] {
                        return Err(Error::Format(format!("expected a rank-1 array of length {n}, found shape {:?}", a.dims)));
                    }
                    a.data
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed());
                    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
                }
            };
            let v = FieldVector::from_values(&ops.grid, values)?;
            let hodge = Hodge::new(&ops)?;
            let split = hodge.project_q(&v)?;
            let harmonic = harmonic_basis_seeded(&ops, cli.seed())?;
            std::fs::create_dir_all(out)?;
            Array::vector(split.gradient_part.values().to_vec()).save(&out.join("gradient.bin"))?;
            Array::vector(split.divfree_part.values().to_vec()).save(&out.join("divfree.bin"))?;
            Array::vector(split.potential.clone()).save(&out.join("potential.bin"))?;
            let vv = inner(&v, &v)?;
            let completeness = split.gradient_part.add(&split.divfree_part)?.sub(&v)?.norm();
            write_json(
                &out.join("report.json"),
                &json!({
                    "dim_harmonic": harmonic.dimension(),
                    "orthogonality_residual": split.orthogonality_residual(),
                    "relative_orthogonality_residual": if vv > 0.0 { split.orthogonality_residual() / vv } else { 0.0 },
                    "completeness_residual": completeness,
                }),
            )
        }
        Command::Modes { domain, count, out } => {
            let ops = operators(domain)?;
            let basis = transverse_modes_with(&ops, *count, &mode_options(cli))?;
            std::fs::create_dir_all(out)?;
            let rows: Vec<Vec<String>> = basis
                .omegas
                .iter()
                .enumerate()
                .map(|(i, w)| vec![i.to_string(), fmt_f64(*w)])
                .collect();
            write_csv(&out.join("omegas.csv"), &["index", "omega"], &rows)?;
            let vectors: Vec<&[f64]> = basis.vectors.iter().map(|v| v.values()).collect();
            Array::from_rows(&vectors)?.save(&out.join("modes.bin"))
        }
        Command::Coulomb { domain, dipoles, out } => {
            let ops = operators(domain)?;
            let set = load_dipoles(dipoles)?;
            let hodge = Hodge::new(&ops)?;
            let report = energy_report_with(&hodge, &set)?;
            let pol = verify_polarization_with(&hodge, &set)?;
            let value = json!({
                "report": report,
                "cancellation_residual": report.cancellation_residual(),
                "pythagoras_residual": report.pythagoras_residual(),
                "coulomb_residual": report.coulomb_residual(),
                "bilinearity_residual": report.bilinearity_residual(),
                "divergence_residual": pol.divergence_residual,
                "projector_residual": pol.projector_residual,
            });
            match out {
                None => print_json(&value),
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    write_json(&dir.join("energy.json"), &value)
                }
            }
        }
        Command::Dicke {
            params,
            nmax,
            sweep,
            out,
        } => {
            let mut p: DickeParams = serde_json::from_str(&std::fs::read_to_string(params)?)?;
            if let Some(n) = nmax {
                p.n_max = *n;
            }
            let d = DickeSolverOptions::default();
            let opts = DickeSolverOptions {
                tol: cli.tol.unwrap_or(d.tol),
                seed: cli.seed(),
                ..d
            };
            let spectrum = dicke::ground_state_with(&p, &opts)?;
            std::fs::create_dir_all(out)?;
            write_json(&out.join("spectrum.json"), &spectrum)?;
            if let Some(g) = sweep {
                let rows = dicke::sweep_coupling(&p, g, &opts)?;
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
                    &out.join("sweep.csv"),
                    &["g", "E0_per_atom", "photons_per_atom", "converged"],
                    &table,
                )?;
            }
            Ok(())
        }
        Command::Pipeline {
            config,
            domain,
            dipoles,
            mode,
            g_scales,
            nmax,
            out,
        } => {
            let cfg = config.as_deref().map(PipelineConfig::load).transpose()?;
            let missing = |what: &str| Error::InvalidParams(format!("pipeline needs --{what} or a config entry"));
            let domain_path = domain.clone().or(cfg.as_ref().map(|c| c.domain.clone())).ok_or_else(|| missing("domain"))?;
            let dipole_path = dipoles.clone().or(cfg.as_ref().map(|c| c.dipoles.clone())).ok_or_else(|| missing("dipoles"))?;
            let inputs = PipelineInputs {
                domain: load_domain(&domain_path)?,
                dipoles: load_dipoles(&dipole_path)?,
                mode: mode.or(cfg.as_ref().map(|c| c.mode)).ok_or_else(|| missing("mode"))?,
                g_scales: g_scales
                    .clone()
                    .or(cfg.as_ref().map(|c| c.g_scales.clone()))
                    .unwrap_or_else(|| vec![1.0]),
                n_max: nmax.or(cfg.as_ref().and_then(|c| c.n_max)).unwrap_or(DEFAULT_N_MAX),
                mode_count: cfg.as_ref().and_then(|c| c.mode_count),
                tol: cli.tol.or(cfg.as_ref().and_then(|c| c.tol)),
                seed: cli.seed.or(cfg.as_ref().and_then(|c| c.seed)).unwrap_or(DEFAULT_SEED),
            };
            run_pipeline(&inputs, out).map(|_| ())
        }
    }
}
