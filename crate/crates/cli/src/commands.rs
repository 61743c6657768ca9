//! The five commands: spectrum scan, mode evolution, momentum sweep, defect
//! densities, and the validation driver.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use nhmetric_core::defects::{defect_density, QuenchRate};
use nhmetric_core::evolution::{
    evolve_trajectory, min_window_scale, EvolveError, IntegratorConfig, Trajectory,
};
use nhmetric_core::model::ModeParams;
use nhmetric_core::observables::{
    adiabatic_sigma_z, asymptotic_readout, asymptotic_sigma_z, ExpectationMethod,
};
use nhmetric_core::validation;

use crate::config::{CommandKind, RunConfig};
use crate::records::{Cell, Table};

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: configuration or I/O problems.
    Config(String),
    /// Exit 2: numerical failure (metric breakdown, non-convergence, ...).
    Numerical(String),
    /// Exit 3: one or more validation criteria failed.
    Validation(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Validation(n) => write!(f, "{n} validation criterion(s) failed"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

fn numerical(e: EvolveError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn mode_params(cfg: &RunConfig, k: f64) -> Result<ModeParams, CliError> {
    ModeParams::new(k, cfg.gamma, cfg.force).map_err(|e| CliError::Config(e.to_string()))
}

fn write_output(cfg: &RunConfig, payload: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(payload.as_bytes())
                .map_err(|e| CliError::Config(format!("stdout: {e}")))?;
            Ok(())
        }
    }
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Spectrum => cmd_spectrum(cfg),
        CommandKind::Evolve => cmd_evolve(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Defects => cmd_defects(cfg),
        CommandKind::Validate => cmd_validate(cfg),
    }
}

const SPECTRUM_COLUMNS: &[&str] = &[
    "k",
    "t",
    "re_e_plus",
    "im_e_plus",
    "re_e_minus",
    "im_e_minus",
    "ep_time_neg",
    "ep_time_pos",
];

fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let mut table = Table::new(SPECTRUM_COLUMNS);
    let t_end = cfg.window / cfg.force.sqrt();
    for &k in &cfg.k_values {
        let p = mode_params(cfg, k)?;
        let eps = p.ep_times().as_array();
        let (ep_neg, ep_pos) = match (eps[0], eps[1]) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a),
            _ => (f64::NAN, f64::NAN),
        };
        for i in 0..cfg.samples {
            let t = if cfg.samples == 1 {
                t_end
            } else {
                -t_end + 2.0 * t_end * i as f64 / (cfg.samples - 1) as f64
            };
            let (e_plus, e_minus) = p.instantaneous_eigenvalues(t);
            table.push(vec![
                Cell::Num(k),
                Cell::Num(t),
                Cell::Num(e_plus.re),
                Cell::Num(e_plus.im),
                Cell::Num(e_minus.re),
                Cell::Num(e_minus.im),
                Cell::Num(ep_neg),
                Cell::Num(ep_pos),
            ]);
        }
    }
    write_output(cfg, &table.render(cfg.format))
}

const EVOLVE_COLUMNS: &[&str] = &[
    "k",
    "t",
    "re_psi1",
    "im_psi1",
    "re_psi2",
    "im_psi2",
    "log_gauge",
    "bloch_metric_x",
    "bloch_metric_y",
    "bloch_metric_z",
    "bloch_norm_x",
    "bloch_norm_y",
    "bloch_norm_z",
    "sigma_z_metric",
    "sigma_z_norm",
    "h_herm_residual",
];

fn integrator_config(cfg: &RunConfig, p: &ModeParams, window: f64) -> IntegratorConfig {
    let mut ic = IntegratorConfig::for_window(p, window);
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = cfg.abs_tol;
    ic.sample_count = cfg.samples;
    ic
}

fn cmd_evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let trajectories: Result<Vec<Trajectory>, CliError> = pool(cfg)?.install(|| {
        cfg.k_values
            .par_iter()
            .map(|&k| {
                let p = mode_params(cfg, k)?;
                evolve_trajectory(&p, &integrator_config(cfg, &p, cfg.window)).map_err(numerical)
            })
            .collect()
    });
    let mut table = Table::new(EVOLVE_COLUMNS);
    for (k, traj) in cfg.k_values.iter().zip(trajectories?) {
        for s in &traj.samples {
            table.push(vec![
                Cell::Num(*k),
                Cell::Num(s.t),
                Cell::Num(s.psi.c1.re),
                Cell::Num(s.psi.c1.im),
                Cell::Num(s.psi.c2.re),
                Cell::Num(s.psi.c2.im),
                Cell::Num(s.log_gauge),
                Cell::Num(s.bloch_metric[0]),
                Cell::Num(s.bloch_metric[1]),
                Cell::Num(s.bloch_metric[2]),
                Cell::Num(s.bloch_norm[0]),
                Cell::Num(s.bloch_norm[1]),
                Cell::Num(s.bloch_norm[2]),
                Cell::Num(s.sigma_z_metric),
                Cell::Num(s.sigma_z_norm),
                Cell::Num(s.metric_frame.as_ref().map_or(f64::NAN, |f| f.herm_residual)),
            ]);
        }
    }
    write_output(cfg, &table.render(cfg.format))
}

const SWEEP_COLUMNS: &[&str] = &[
    "k",
    "window",
    "sigma_z_metric_end",
    "sigma_z_norm_end",
    "readout_metric",
    "readout_norm",
    "formula_metric",
    "formula_norm",
    "adiabatic_metric",
    "adiabatic_norm",
];

fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let rows: Result<Vec<Vec<Cell>>, CliError> = pool(cfg)?.install(|| {
        cfg.k_values
            .par_iter()
            .map(|&k| {
                let p = mode_params(cfg, k)?;
                // asymptotics need the start point to satisfy the
                // initial-condition precondition; enlarge per mode
                let window = cfg.window.max(min_window_scale(&p));
                let traj =
                    evolve_trajectory(&p, &integrator_config(cfg, &p, window)).map_err(numerical)?;
                let last = traj.last();
                let (rm, _) = asymptotic_readout(&traj, ExpectationMethod::Metric)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let (rn, _) = asymptotic_readout(&traj, ExpectationMethod::Norm)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let fm = asymptotic_sigma_z(&p, ExpectationMethod::Metric)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .value;
                let fnm = asymptotic_sigma_z(&p, ExpectationMethod::Norm)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .value;
                Ok(vec![
                    Cell::Num(k),
                    Cell::Num(window),
                    Cell::Num(last.sigma_z_metric),
                    Cell::Num(last.sigma_z_norm),
                    Cell::Num(rm),
                    Cell::Num(rn),
                    Cell::Num(fm),
                    Cell::Num(fnm),
                    Cell::Num(adiabatic_sigma_z(&p, ExpectationMethod::Metric).value),
                    Cell::Num(adiabatic_sigma_z(&p, ExpectationMethod::Norm).value),
                ])
            })
            .collect()
    });
    let mut table = Table::new(SWEEP_COLUMNS);
    for row in rows? {
        table.push(row);
    }
    write_output(cfg, &table.render(cfg.format))
}

const DEFECTS_COLUMNS: &[&str] = &[
    "method",
    "rate_kind",
    "force",
    "gamma",
    "k_max",
    "sigma_pts",
    "sigma_ptb",
    "sigma_total",
    "error_estimate",
];

fn cmd_defects(cfg: &RunConfig) -> Result<(), CliError> {
    let mut table = Table::new(DEFECTS_COLUMNS);
    for method in cfg.method.methods() {
        let mut rates = Vec::new();
        if cfg.adiabatic {
            rates.push(QuenchRate::Adiabatic);
        }
        if cfg.finite {
            rates.push(QuenchRate::Finite(cfg.force));
        }
        for rate in rates {
            let summary = defect_density(cfg.gamma, rate, method, cfg.k_max)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            let (kind, force) = match rate {
                QuenchRate::Adiabatic => ("adiabatic", f64::NAN),
                QuenchRate::Finite(f) => ("finite", f),
            };
            table.push(vec![
                Cell::Text(method.label().into()),
                Cell::Text(kind.into()),
                Cell::Num(force),
                Cell::Num(summary.gamma),
                Cell::Num(summary.k_max),
                Cell::Num(summary.sigma_pts),
                Cell::Num(summary.sigma_ptb),
                Cell::Num(summary.sigma_total()),
                Cell::Num(summary.error_estimate),
            ]);
        }
    }
    write_output(cfg, &table.render(cfg.format))
}

fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let outcomes = match &cfg.only {
        Some(name) => {
            let one = validation::run_by_name(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown criterion '{name}' (available: {})",
                    validation::criterion_names().join(", ")
                ))
            })?;
            vec![one]
        }
        None => {
            // criteria are independent; fan out
            let names = validation::criterion_names();
            pool(cfg)?.install(|| {
                names
                    .par_iter()
                    .map(|n| validation::run_by_name(n).expect("known criterion"))
                    .collect()
            })
        }
    };
    let mut report = String::new();
    let mut failures = 0usize;
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        report.push_str(&format!("{verdict} {} - {}\n", o.name, o.details));
        if !o.passed {
            failures += 1;
        }
    }
    if let Some(path) = &cfg.out {
        std::fs::write(path, &report)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{report}");
    if failures > 0 {
        return Err(CliError::Validation(failures));
    }
    Ok(())
}
