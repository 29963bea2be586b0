//! Config-driven experiment runner behind the `nrk` binary: one subcommand
//! per end-to-end experiment, CSV/JSON figure data, and a reproducibility
//! manifest.

mod config;
mod run;

pub use config::{
    parse_config_str, Experiment, ExperimentConfig, GridSpec, Line, OutputFormat, SweepAxis,
};
pub use run::{resolve_output_dir, run, PointStatus, RunManifest, ARTIFACT_VERSION};

/// Environment variable naming the default root for relative output paths.
pub const OUTPUT_ROOT_ENV: &str = "NRK_OUTPUT_ROOT";
