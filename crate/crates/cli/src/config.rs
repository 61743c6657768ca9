//! Resolved run configuration, compiled-in presets, and the plain-text
//! key-value round trip.
//!
//! Resolution order: built-in defaults for the command, then the preset,
//! then a `--config` file, then explicit command-line flags. The resolved
//! config serializes losslessly (`to_kv` / `from_kv` is the identity on
//! resolved configs).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nhmetric_core::observables::ExpectationMethod;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Evolve,
    Sweep,
    Defects,
    Validate,
}

impl CommandKind {
    pub fn label(&self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Evolve => "evolve",
            CommandKind::Sweep => "sweep",
            CommandKind::Defects => "defects",
            CommandKind::Validate => "validate",
        }
    }
}

impl FromStr for CommandKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "spectrum" => Ok(CommandKind::Spectrum),
            "evolve" => Ok(CommandKind::Evolve),
            "sweep" => Ok(CommandKind::Sweep),
            "defects" => Ok(CommandKind::Defects),
            "validate" => Ok(CommandKind::Validate),
            other => err(format!("unknown command '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSel {
    Metric,
    Norm,
    Both,
}

impl MethodSel {
    pub fn label(&self) -> &'static str {
        match self {
            MethodSel::Metric => "metric",
            MethodSel::Norm => "norm",
            MethodSel::Both => "both",
        }
    }

    pub fn methods(&self) -> Vec<ExpectationMethod> {
        match self {
            MethodSel::Metric => vec![ExpectationMethod::Metric],
            MethodSel::Norm => vec![ExpectationMethod::Norm],
            MethodSel::Both => vec![ExpectationMethod::Metric, ExpectationMethod::Norm],
        }
    }
}

impl FromStr for MethodSel {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "metric" => Ok(MethodSel::Metric),
            "norm" => Ok(MethodSel::Norm),
            "both" => Ok(MethodSel::Both),
            other => err(format!("unknown method '{other}' (metric|norm|both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn label(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub gamma: f64,
    pub force: f64,
    pub k_values: Vec<f64>,
    /// Window scale `S`: the run covers `t in [-S, S] / sqrt(F)`.
    pub window: f64,
    pub method: MethodSel,
    pub k_max: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub jobs: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub samples: usize,
    /// defects: include the rate-to-zero rows.
    pub adiabatic: bool,
    /// defects: include the finite-rate rows (at `force`).
    pub finite: bool,
    /// validate: run only this criterion.
    pub only: Option<String>,
}

impl RunConfig {
    pub fn defaults(command: CommandKind) -> Self {
        RunConfig {
            command,
            gamma: 1.0,
            force: 0.4,
            k_values: vec![0.2, 1.0, 2.0],
            window: 80.0,
            method: MethodSel::Both,
            k_max: std::f64::consts::PI,
            out: None,
            format: OutputFormat::Csv,
            jobs: default_jobs(),
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            samples: 801,
            adiabatic: true,
            finite: true,
            only: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gamma.is_finite() && self.force.is_finite() && self.force > 0.0) {
            return err("gamma must be finite and force positive");
        }
        if self.k_values.is_empty() && self.command != CommandKind::Defects
            && self.command != CommandKind::Validate
        {
            return err("no momenta given (--k or --k-grid)");
        }
        if self.k_values.iter().any(|k| !k.is_finite()) {
            return err("momenta must be finite");
        }
        if !(self.window > 0.0) {
            return err("window must be positive");
        }
        if !(self.k_max >= self.gamma.abs()) {
            return err("kmax must be >= |gamma|");
        }
        if self.samples == 0 {
            return err("samples must be >= 1");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return err("tolerances must be positive");
        }
        if self.jobs == 0 {
            return err("jobs must be >= 1");
        }
        if self.command == CommandKind::Defects && !self.adiabatic && !self.finite {
            return err("defects: nothing to do (both adiabatic and finite disabled)");
        }
        Ok(())
    }

    /// Serialize as `key = value` lines with lossless float formatting.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut push = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        push("command", self.command.label().into());
        push("gamma", fmt_float(self.gamma));
        push("force", fmt_float(self.force));
        push(
            "k_values",
            self.k_values.iter().map(|k| fmt_float(*k)).collect::<Vec<_>>().join(","),
        );
        push("window", fmt_float(self.window));
        push("method", self.method.label().into());
        push("k_max", fmt_float(self.k_max));
        push("out", self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        push("format", self.format.label().into());
        push("jobs", self.jobs.to_string());
        push("rel_tol", fmt_float(self.rel_tol));
        push("abs_tol", fmt_float(self.abs_tol));
        push("samples", self.samples.to_string());
        push("adiabatic", self.adiabatic.to_string());
        push("finite", self.finite.to_string());
        push("only", self.only.clone().unwrap_or_default());
        s
    }

    /// Parse `key = value` lines, overlaying onto `self`.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "command" => self.command = value.parse()?,
                "gamma" => self.gamma = parse_float(key, value)?,
                "force" => self.force = parse_float(key, value)?,
                "k_values" => {
                    self.k_values = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|v| parse_float("k_values", v.trim()))
                            .collect::<Result<_, _>>()?
                    }
                }
                "window" => self.window = parse_float(key, value)?,
                "method" => self.method = value.parse()?,
                "k_max" => self.k_max = parse_float(key, value)?,
                "out" => self.out = if value.is_empty() { None } else { Some(value.into()) },
                "format" => self.format = value.parse()?,
                "jobs" => {
                    self.jobs = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad jobs value '{value}'")))?
                }
                "rel_tol" => self.rel_tol = parse_float(key, value)?,
                "abs_tol" => self.abs_tol = parse_float(key, value)?,
                "samples" => {
                    self.samples = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad samples value '{value}'")))?
                }
                "adiabatic" => self.adiabatic = parse_bool(key, value)?,
                "finite" => self.finite = parse_bool(key, value)?,
                "only" => self.only = if value.is_empty() { None } else { Some(value.into()) },
                other => return err(format!("unknown config key '{other}'")),
            }
        }
        Ok(())
    }

}

fn parse_float(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError(format!("bad {key} value '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => err(format!("bad {key} value '{value}' (true|false)")),
    }
}

/// 17-significant-digit float formatting: lossless under f64 round trip and
/// byte-deterministic.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn default_jobs() -> usize {
    if let Ok(v) = std::env::var("NHMETRIC_JOBS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Expand an `N:MIN:MAX` grid specification into momenta.
pub fn parse_k_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return err(format!("bad k-grid '{spec}' (expected N:MIN:MAX)"));
    }
    let n: usize =
        parts[0].parse().map_err(|_| ConfigError(format!("bad grid count '{}'", parts[0])))?;
    let lo = parse_float("k-grid min", parts[1])?;
    let hi = parse_float("k-grid max", parts[2])?;
    if n == 0 || !(lo <= hi) {
        return err(format!("bad k-grid '{spec}'"));
    }
    if n == 1 {
        return Ok(vec![0.5 * (lo + hi)]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Compiled-in scenario presets.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = match name {
        // instantaneous-spectrum scan across the three mode classes
        "fig1" => {
            let mut c = RunConfig::defaults(CommandKind::Spectrum);
            c.gamma = 1.0;
            c.force = 0.4;
            c.k_values = vec![0.2, 1.0, 2.0];
            c.window = 80.0;
            c.samples = 801;
            c
        }
        // Bloch-sphere trajectories of the four representative momenta
        "fig2" => {
            let mut c = RunConfig::defaults(CommandKind::Evolve);
            c.gamma = 1.0;
            c.force = 0.4;
            c.k_values = vec![2.0, 1.1, 1.0, 0.2];
            c.window = 80.0;
            c.samples = 801;
            c
        }
        // slow-quench momentum sweep of the asymptotic spin expectations
        "fig3" => {
            let mut c = RunConfig::defaults(CommandKind::Sweep);
            c.gamma = 1.0;
            c.force = 1.0 / 400.0;
            c.k_values = parse_k_grid("41:-2:2")?;
            c.window = 200.0;
            c.samples = 33;
            c
        }
        // moderate-quench sweep comparing end points with the closed forms
        "eq6" => {
            let mut c = RunConfig::defaults(CommandKind::Sweep);
            c.gamma = 1.0;
            c.force = 0.4;
            c.k_values = parse_k_grid("41:-2:2")?;
            c.window = 80.0;
            c.samples = 33;
            c
        }
        // defect densities: rate-to-zero limit plus a slow finite rate
        "eq8" => {
            let mut c = RunConfig::defaults(CommandKind::Defects);
            c.gamma = 1.0;
            c.force = 1.0 / 400.0;
            c.k_max = std::f64::consts::PI;
            c.adiabatic = true;
            c.finite = true;
            c
        }
        other => {
            return err(format!(
                "unknown preset '{other}' (available: {})",
                preset_names().join(", ")
            ))
        }
    };
    cfg.jobs = default_jobs();
    Ok(cfg)
}

pub fn preset_names() -> [&'static str; 5] {
    ["fig1", "fig2", "fig3", "eq6", "eq8"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip_is_identity() {
        let mut cfg = RunConfig::defaults(CommandKind::Sweep);
        cfg.gamma = 1.0 / 3.0;
        cfg.force = 0.123456789012345678;
        cfg.k_values = vec![-2.0, 0.1 + 0.2, std::f64::consts::PI];
        cfg.out = Some("out/data.csv".into());
        cfg.only = Some("framework-invariants".into());
        let text = cfg.to_kv();
        let mut back = RunConfig::defaults(CommandKind::Spectrum);
        back.apply_kv(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.to_kv(), text);
    }

    #[test]
    fn k_grid_expansion() {
        let g = parse_k_grid("5:-2:2").unwrap();
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(parse_k_grid("0:-1:1").is_err());
        assert!(parse_k_grid("5:2:-2").is_err());
        assert!(parse_k_grid("nope").is_err());
    }

    #[test]
    fn presets_exist_and_validate() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(f64::NAN), "nan");
    }
}
