//! Plain-text experiment configuration: `key = value` lines with optional
//! `[params]` and `[sweep]` sections, `#` comments.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::model::{Boundary, ModelParams};
use crate::{Error, Result};

/// Which end-to-end experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SpectrumSweep,
    Dynamics,
    SteadyState,
    RelaxationSweep,
    PbcCurrents,
    LengthscaleSweep,
    OracleCheck,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SpectrumSweep => "spectrum_sweep",
            Experiment::Dynamics => "dynamics",
            Experiment::SteadyState => "steady_state",
            Experiment::RelaxationSweep => "relaxation_sweep",
            Experiment::PbcCurrents => "pbc_currents",
            Experiment::LengthscaleSweep => "lengthscale_sweep",
            Experiment::OracleCheck => "oracle_check",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "spectrum_sweep" => Experiment::SpectrumSweep,
            "dynamics" => Experiment::Dynamics,
            "steady_state" => Experiment::SteadyState,
            "relaxation_sweep" => Experiment::RelaxationSweep,
            "pbc_currents" => Experiment::PbcCurrents,
            "lengthscale_sweep" => Experiment::LengthscaleSweep,
            "oracle_check" => Experiment::OracleCheck,
            other => {
                return Err(Error::Config(format!("unknown experiment '{other}'")))
            }
        })
    }
}

/// Parameter line of the model: both presets tie Γ_h = 2w, θ_h = π/2,
/// μ = 0; the non-reciprocal line additionally couples Γ_p = 2Δ,
/// θ_p = -π/2. `Custom` leaves every coupling as configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Coherent,
    Nonreciprocal,
    Custom,
}

impl Line {
    pub fn name(&self) -> &'static str {
        match self {
            Line::Coherent => "coherent",
            Line::Nonreciprocal => "nonreciprocal",
            Line::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Grid specification for a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Linear { min: f64, max: f64, count: usize },
    Geometric { min: f64, max: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            GridSpec::Linear { min, max, count } => {
                if count == 1 {
                    vec![min]
                } else {
                    (0..count)
                        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
                        .collect()
                }
            }
            GridSpec::Geometric { min, max, count } => {
                crate::evolution::geometric_times(min, max, count.max(2))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (min, max, count, geometric) = match *self {
            GridSpec::Linear { min, max, count } => (min, max, count, false),
            GridSpec::Geometric { min, max, count } => (min, max, count, true),
        };
        if count == 0 {
            return Err(Error::Config("sweep grid must be non-empty".into()));
        }
        if max < min {
            return Err(Error::Config("sweep grid bounds out of order".into()));
        }
        if geometric && (min <= 0.0 || count < 2) {
            return Err(Error::Config(
                "geometric grids need positive bounds and at least 2 points".into(),
            ));
        }
        Ok(())
    }
}

/// One sweep axis: the template parameter to vary and its grid.
#[derive(Debug, Clone)]
pub struct SweepAxis {
    pub param: String,
    pub grid: GridSpec,
}

pub const SWEEPABLE: &[&str] = &["delta", "mu", "w", "gamma_h", "gamma_p", "n_sites"];

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub line: Line,
    pub params: ModelParams,
    pub sweep: Option<SweepAxis>,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub seed: u64,
    pub format: OutputFormat,
    /// Horizon for trajectory experiments (units 1/w).
    pub t_max: f64,
    /// Number of trajectory samples.
    pub n_times: usize,
    /// Relative relaxation threshold.
    pub epsilon: f64,
    /// Random parameter draws for the oracle check.
    pub draws: usize,
}

impl ExperimentConfig {
    /// Preset for an experiment on one of the standard parameter lines;
    /// every headline result is reproducible from one of these plus a
    /// sweep tweak.
    pub fn preset(experiment: Experiment) -> Self {
        let (line, boundary, n_sites) = match experiment {
            Experiment::SpectrumSweep => (Line::Nonreciprocal, Boundary::Open, 100),
            Experiment::Dynamics => (Line::Coherent, Boundary::Open, 100),
            Experiment::SteadyState => (Line::Coherent, Boundary::Open, 200),
            Experiment::RelaxationSweep => (Line::Coherent, Boundary::Periodic, 100),
            Experiment::PbcCurrents => (Line::Coherent, Boundary::Periodic, 200),
            Experiment::LengthscaleSweep => (Line::Coherent, Boundary::Open, 200),
            Experiment::OracleCheck => (Line::Custom, Boundary::Open, 3),
        };
        let mut params = match line {
            Line::Nonreciprocal => ModelParams::nonreciprocal_pairing(0.5, n_sites, boundary),
            _ => ModelParams::coherent_pairing(0.5, n_sites, boundary),
        };
        params.boundary = boundary;
        let sweep = match experiment {
            Experiment::SpectrumSweep => Some(SweepAxis {
                param: "delta".into(),
                grid: GridSpec::Geometric {
                    min: 0.1,
                    max: 10.0,
                    count: 25,
                },
            }),
            Experiment::RelaxationSweep => Some(SweepAxis {
                param: "delta".into(),
                grid: GridSpec::Geometric {
                    min: 0.05,
                    max: 0.3,
                    count: 8,
                },
            }),
            Experiment::PbcCurrents => Some(SweepAxis {
                param: "delta".into(),
                grid: GridSpec::Geometric {
                    min: 0.5,
                    max: 50.0,
                    count: 12,
                },
            }),
            Experiment::LengthscaleSweep => Some(SweepAxis {
                param: "delta".into(),
                grid: GridSpec::Linear {
                    min: 2.0,
                    max: 10.0,
                    count: 9,
                },
            }),
            _ => None,
        };
        // The slowest relaxation point (delta = 0.05 w) decays at a rate
        // ~delta^2/w, so reaching a 1e-3 threshold needs a horizon of a few
        // thousand hopping times.
        let (t_max, n_times) = match experiment {
            Experiment::RelaxationSweep => (5000.0, 120),
            _ => (10.0, 80),
        };
        ExperimentConfig {
            experiment,
            line,
            params,
            sweep,
            output_dir: PathBuf::from(experiment.name()),
            workers: 1,
            seed: 1,
            format: OutputFormat::Csv,
            t_max,
            n_times,
            epsilon: 1e-3,
            draws: 20,
        }
    }

    /// The parameter set at one sweep value, with line couplings re-derived.
    pub fn params_at(&self, value: f64) -> Result<ModelParams> {
        let mut p = self.params.clone();
        if let Some(axis) = &self.sweep {
            set_param(&mut p, &axis.param, value)?;
        }
        self.apply_line(&mut p);
        p.validate()?;
        Ok(p)
    }

    fn apply_line(&self, p: &mut ModelParams) {
        match self.line {
            Line::Coherent => {
                p.mu = 0.0;
                p.gamma_h = 2.0 * p.w;
                p.theta_h = PI / 2.0;
                p.gamma_p = 0.0;
                p.theta_p = -PI / 2.0;
            }
            Line::Nonreciprocal => {
                p.mu = 0.0;
                p.gamma_h = 2.0 * p.w;
                p.theta_h = PI / 2.0;
                p.gamma_p = 2.0 * p.delta;
                p.theta_p = -PI / 2.0;
            }
            Line::Custom => {}
        }
    }

    /// Sweep grid values; a single dummy value when the experiment has no
    /// sweep axis.
    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(axis) => axis.grid.values(),
            None => vec![self.params.delta],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(axis) = &self.sweep {
            if !SWEEPABLE.contains(&axis.param.as_str()) {
                return Err(Error::Config(format!(
                    "unknown sweep parameter '{}'",
                    axis.param
                )));
            }
            axis.grid.validate()?;
        }
        let mut p = self.params.clone();
        self.apply_line(&mut p);
        p.validate()
            .map_err(|e| Error::Config(format!("invalid model parameters: {e}")))?;
        Ok(())
    }

    /// Canonical one-line-per-field rendering; hashed into the manifest and
    /// reparseable by `parse_config_str`.
    pub fn canonical_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        s += &format!("experiment = {}\n", self.experiment.name());
        s += &format!("line = {}\n", self.line.name());
        s += &format!("output_dir = {}\n", self.output_dir.display());
        s += &format!("workers = {}\n", self.workers);
        s += &format!("seed = {}\n", self.seed);
        s += &format!("format = {}\n", self.format.name());
        s += &format!("t_max = {}\n", self.t_max);
        s += &format!("n_times = {}\n", self.n_times);
        s += &format!("epsilon = {}\n", self.epsilon);
        s += &format!("draws = {}\n", self.draws);
        s += "\n[params]\n";
        s += &format!("w = {}\n", p.w);
        s += &format!("delta = {}\n", p.delta);
        s += &format!("mu = {}\n", p.mu);
        s += &format!("gamma_h = {}\n", p.gamma_h);
        s += &format!("theta_h = {}\n", p.theta_h);
        s += &format!("gamma_p = {}\n", p.gamma_p);
        s += &format!("theta_p = {}\n", p.theta_p);
        s += &format!("n_sites = {}\n", p.n_sites);
        s += &format!(
            "boundary = {}\n",
            match p.boundary {
                Boundary::Open => "open",
                Boundary::Periodic => "periodic",
            }
        );
        if let Some(axis) = &self.sweep {
            let (grid, min, max, count) = match axis.grid {
                GridSpec::Linear { min, max, count } => ("linear", min, max, count),
                GridSpec::Geometric { min, max, count } => ("geometric", min, max, count),
            };
            s += "\n[sweep]\n";
            s += &format!("param = {}\n", axis.param);
            s += &format!("grid = {grid}\n");
            s += &format!("min = {min}\n");
            s += &format!("max = {max}\n");
            s += &format!("count = {count}\n");
        }
        s
    }
}

fn set_param(p: &mut ModelParams, name: &str, value: f64) -> Result<()> {
    match name {
        "delta" => p.delta = value,
        "mu" => p.mu = value,
        "w" => p.w = value,
        "gamma_h" => p.gamma_h = value,
        "gamma_p" => p.gamma_p = value,
        "n_sites" => {
            if value < 2.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "n_sites sweep value {value} is not an integer >= 2"
                )));
            }
            p.n_sites = value as usize;
        }
        other => {
            return Err(Error::Config(format!("unknown sweep parameter '{other}'")))
        }
    }
    Ok(())
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut section = String::new();
    out.entry(section.clone()).or_default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_string();
            out.entry(section.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let prev = out
            .get_mut(&section)
            .unwrap()
            .insert(key.trim().to_string(), value.trim().to_string());
        if prev.is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key '{}'",
                lineno + 1,
                key.trim()
            )));
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("cannot parse {key} = '{v}'"))),
    }
}

/// Parses a configuration file body. Missing keys fall back to the preset
/// of the configured (or given) experiment.
pub fn parse_config_str(text: &str, default_experiment: Option<Experiment>) -> Result<ExperimentConfig> {
    let sections = parse_sections(text)?;
    let top = sections.get("").cloned().unwrap_or_default();
    let experiment = match top.get("experiment") {
        Some(name) => Experiment::from_name(name)?,
        None => default_experiment
            .ok_or_else(|| Error::Config("missing 'experiment' key".into()))?,
    };
    if let Some(exp) = default_experiment {
        if exp != experiment {
            return Err(Error::Config(format!(
                "config is for '{}' but the '{}' experiment was requested",
                experiment.name(),
                exp.name()
            )));
        }
    }
    let mut cfg = ExperimentConfig::preset(experiment);

    if let Some(line) = top.get("line") {
        cfg.line = match line.as_str() {
            "coherent" => Line::Coherent,
            "nonreciprocal" => Line::Nonreciprocal,
            "custom" => Line::Custom,
            other => return Err(Error::Config(format!("unknown line '{other}'"))),
        };
    }
    if let Some(dir) = top.get("output_dir") {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(v) = parse_value(&top, "workers")? {
        cfg.workers = v;
    }
    if let Some(v) = parse_value(&top, "seed")? {
        cfg.seed = v;
    }
    if let Some(f) = top.get("format") {
        cfg.format = match f.as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => return Err(Error::Config(format!("unknown format '{other}'"))),
        };
    }
    if let Some(v) = parse_value(&top, "t_max")? {
        cfg.t_max = v;
    }
    if let Some(v) = parse_value(&top, "n_times")? {
        cfg.n_times = v;
    }
    if let Some(v) = parse_value(&top, "epsilon")? {
        cfg.epsilon = v;
    }
    if let Some(v) = parse_value(&top, "draws")? {
        cfg.draws = v;
    }

    if let Some(params) = sections.get("params") {
        let p = &mut cfg.params;
        if let Some(v) = parse_value(params, "w")? {
            p.w = v;
        }
        if let Some(v) = parse_value(params, "delta")? {
            p.delta = v;
        }
        if let Some(v) = parse_value(params, "mu")? {
            p.mu = v;
        }
        if let Some(v) = parse_value(params, "gamma_h")? {
            p.gamma_h = v;
        }
        if let Some(v) = parse_value(params, "theta_h")? {
            p.theta_h = v;
        }
        if let Some(v) = parse_value(params, "gamma_p")? {
            p.gamma_p = v;
        }
        if let Some(v) = parse_value(params, "theta_p")? {
            p.theta_p = v;
        }
        if let Some(v) = parse_value(params, "n_sites")? {
            p.n_sites = v;
        }
        if let Some(b) = params.get("boundary") {
            p.boundary = match b.as_str() {
                "open" => Boundary::Open,
                "periodic" => Boundary::Periodic,
                other => return Err(Error::Config(format!("unknown boundary '{other}'"))),
            };
        }
        for key in params.keys() {
            const KNOWN: &[&str] = &[
                "w", "delta", "mu", "gamma_h", "theta_h", "gamma_p", "theta_p", "n_sites",
                "boundary",
            ];
            if !KNOWN.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown [params] key '{key}'")));
            }
        }
    }

    if let Some(sweep) = sections.get("sweep") {
        let param: String = parse_value(sweep, "param")?
            .ok_or_else(|| Error::Config("sweep section needs 'param'".into()))?;
        let grid_kind = sweep.get("grid").map(String::as_str).unwrap_or("linear");
        let min = parse_value(sweep, "min")?
            .ok_or_else(|| Error::Config("sweep section needs 'min'".into()))?;
        let max = parse_value(sweep, "max")?
            .ok_or_else(|| Error::Config("sweep section needs 'max'".into()))?;
        let count = parse_value(sweep, "count")?
            .ok_or_else(|| Error::Config("sweep section needs 'count'".into()))?;
        let grid = match grid_kind {
            "linear" => GridSpec::Linear { min, max, count },
            "geometric" => GridSpec::Geometric { min, max, count },
            other => return Err(Error::Config(format!("unknown grid '{other}'"))),
        };
        cfg.sweep = Some(SweepAxis { param, grid });
    }

    cfg.validate()?;
    Ok(cfg)
}
