//! `nhmetric`: quench dynamics of a non-Hermitian two-level mode with a
//! dynamical Hilbert-space metric. Emits deterministic CSV/JSON data files
//! for the spectrum, trajectories, asymptotic sweeps, and defect densities,
//! and drives the validation suite.

mod commands;
mod config;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{parse_k_grid, preset, CommandKind, MethodSel, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "nhmetric",
    about = "Non-Hermitian two-level quench dynamics with a dynamical Hilbert-space metric",
    after_help = "Exit codes: 0 success, 1 config/IO error, 2 numerical failure, 3 validation failure.\n\
                  Presets: fig1 (spectrum), fig2 (trajectories), fig3 (slow-quench sweep), \n\
                  eq6 (moderate-quench sweep), eq8 (defect densities).\n\
                  NHMETRIC_JOBS sets the default worker count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Instantaneous eigenvalues and crossing times over the window
    Spectrum(CommonArgs),
    /// Full trajectories: states, Bloch vectors, mapped-frame residuals
    Evolve(CommonArgs),
    /// Per-momentum asymptotic spin expectations: simulation and formulas
    Sweep(CommonArgs),
    /// Momentum-integrated defect densities
    Defects(CommonArgs),
    /// Run the validation suite (all criteria, or --only NAME)
    Validate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Compiled-in scenario preset (fig1|fig2|fig3|eq6|eq8)
    #[arg(long)]
    preset: Option<String>,
    /// Key-value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Imaginary coupling strength
    #[arg(long)]
    gamma: Option<f64>,
    /// Quench force F (alternative to --nonherm-scale)
    #[arg(long)]
    force: Option<f64>,
    /// gamma^2 / F; sets the force from gamma
    #[arg(long = "nonherm-scale")]
    nonherm_scale: Option<f64>,
    /// Momentum values (repeatable)
    #[arg(long = "k", num_args = 1.., allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    /// Momentum grid N:MIN:MAX
    #[arg(long = "k-grid")]
    k_grid: Option<String>,
    /// Window scale S: the run covers t in [-S, S]/sqrt(F)
    #[arg(long)]
    window: Option<f64>,
    /// Expectation method selection (metric|norm|both)
    #[arg(long)]
    method: Option<MethodSel>,
    /// Momentum cutoff for defect densities
    #[arg(long = "kmax")]
    k_max: Option<f64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (csv|json)
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Worker count for sweeps (default: NHMETRIC_JOBS or all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Integrator relative tolerance
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Integrator absolute tolerance
    #[arg(long = "abs-tol")]
    abs_tol: Option<f64>,
    /// Output samples per trajectory / spectrum grid points
    #[arg(long)]
    samples: Option<usize>,
    /// defects: skip the rate-to-zero rows
    #[arg(long = "no-adiabatic")]
    no_adiabatic: bool,
    /// defects: skip the finite-rate rows
    #[arg(long = "no-finite")]
    no_finite: bool,
    /// validate: run a single criterion by name
    #[arg(long)]
    only: Option<String>,
    /// Write the resolved config (key = value lines) to this path
    #[arg(long = "emit-config")]
    emit_config: Option<PathBuf>,
}

fn resolve(kind: CommandKind, args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.preset {
        Some(name) => {
            let p = preset(name)?;
            if p.command != kind {
                return Err(CliError::Config(format!(
                    "preset '{name}' belongs to the '{}' command",
                    p.command.label()
                )));
            }
            p
        }
        None => RunConfig::defaults(kind),
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_kv(&text)?;
        if cfg.command != kind {
            return Err(CliError::Config(format!(
                "config file is for the '{}' command",
                cfg.command.label()
            )));
        }
    }
    if let Some(g) = args.gamma {
        cfg.gamma = g;
    }
    match (args.force, args.nonherm_scale) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("--force and --nonherm-scale are exclusive".into()))
        }
        (Some(f), None) => cfg.force = f,
        (None, Some(scale)) => {
            if !(scale > 0.0) {
                return Err(CliError::Config("--nonherm-scale must be positive".into()));
            }
            cfg.force = cfg.gamma * cfg.gamma / scale;
        }
        (None, None) => {}
    }
    match (&args.k, &args.k_grid) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("--k and --k-grid are exclusive".into()))
        }
        (Some(ks), None) => cfg.k_values = ks.clone(),
        (None, Some(spec)) => cfg.k_values = parse_k_grid(spec)?,
        (None, None) => {}
    }
    if let Some(w) = args.window {
        cfg.window = w;
    }
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(km) = args.k_max {
        cfg.k_max = km;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    if let Some(t) = args.rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(t) = args.abs_tol {
        cfg.abs_tol = t;
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if args.no_adiabatic {
        cfg.adiabatic = false;
    }
    if args.no_finite {
        cfg.finite = false;
    }
    if args.only.is_some() {
        cfg.only = args.only.clone();
    }
    cfg.validate()?;
    if let Some(path) = &args.emit_config {
        std::fs::write(path, cfg.to_kv())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Spectrum(a) => (CommandKind::Spectrum, a),
        Command::Evolve(a) => (CommandKind::Evolve, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::Defects(a) => (CommandKind::Defects, a),
        Command::Validate(a) => (CommandKind::Validate, a),
    };
    let result = resolve(kind, args).and_then(|cfg| {
        eprintln!(
            "nhmetric {}: gamma={} force={} ({} momenta, window {})",
            cfg.command.label(),
            cfg.gamma,
            cfg.force,
            cfg.k_values.len(),
            cfg.window
        );
        commands::run(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nhmetric: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
