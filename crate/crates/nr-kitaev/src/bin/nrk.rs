//! Thin command-line front end over [`nr_kitaev::experiments`]: one
//! subcommand per experiment, each driven by an optional config file plus
//! flag overrides.
//!
//! Exit codes: 0 when every sweep point succeeded, 2 when the run finished
//! but some points failed (see manifest.json), 1 on configuration or I/O
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nr_kitaev::experiments::{
    parse_config_str, resolve_output_dir, run, Experiment, ExperimentConfig, OutputFormat,
    OUTPUT_ROOT_ENV,
};

#[derive(Parser)]
#[command(
    name = "nrk",
    about = "Experiment runner for the dissipative non-reciprocal Kitaev chain",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Open/periodic spectra and transition diagnostics over a pairing sweep
    SpectrumSweep(Common),
    /// Single-particle light cone after a central injection
    Dynamics(Common),
    /// Steady-state density profile and central correlations
    SteadyState(Common),
    /// Relaxation time tau(delta) toward the steady state
    RelaxationSweep(Common),
    /// Steady particle/pairing currents and momentum occupations (periodic)
    PbcCurrents(Common),
    /// Boundary and domain-wall length scales over a pairing sweep
    LengthscaleSweep(Common),
    /// Small-size cross-check against the exact Fock-space integrator
    OracleCheck(Common),
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::SpectrumSweep(c) => (Experiment::SpectrumSweep, c),
            Command::Dynamics(c) => (Experiment::Dynamics, c),
            Command::SteadyState(c) => (Experiment::SteadyState, c),
            Command::RelaxationSweep(c) => (Experiment::RelaxationSweep, c),
            Command::PbcCurrents(c) => (Experiment::PbcCurrents, c),
            Command::LengthscaleSweep(c) => (Experiment::LengthscaleSweep, c),
            Command::OracleCheck(c) => (Experiment::OracleCheck, c),
        }
    }
}

#[derive(Args)]
struct Common {
    /// Config file; missing keys fall back to the experiment preset
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (relative paths resolve under $NRK_OUTPUT_ROOT)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Number of parallel workers
    #[arg(long)]
    workers: Option<usize>,

    /// Seed for randomized experiments
    #[arg(long)]
    seed: Option<u64>,

    /// Output table format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn build_config(experiment: Experiment, common: &Common) -> nr_kitaev::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_config_str(&text, Some(experiment))?
        }
        None => ExperimentConfig::preset(experiment),
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(format) = common.format {
        cfg.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    let root = std::env::var(OUTPUT_ROOT_ENV).ok();
    cfg.output_dir = resolve_output_dir(&cfg.output_dir, root.as_deref());
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = cli.command.split();
    let cfg = match build_config(experiment, &common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("nrk: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(manifest) => {
            let failed = manifest.failed_points();
            for point in &manifest.points {
                println!("{}: {} ({} ms)", point.key, point.status, point.wall_ms);
            }
            println!(
                "wrote {} file(s) to {}",
                manifest.files.len(),
                cfg.output_dir.display()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                eprintln!("nrk: {failed} point(s) failed; see manifest.json");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("nrk: {e}");
            ExitCode::from(1)
        }
    }
}
