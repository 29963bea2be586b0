//! Running a config-driven experiment through the library API.
//!
//! Builds a spectrum sweep from a small inline config, runs it with two
//! workers into a temporary directory, and prints the per-point statuses
//! from the reproducibility manifest. The same config text works with the
//! `nrk` binary: `nrk spectrum-sweep --config sweep.cfg`.

use nr_kitaev::experiments::{parse_config_str, run};

fn main() -> nr_kitaev::Result<()> {
    let config = "\
experiment = spectrum_sweep
line = nonreciprocal
workers = 2
output_dir = /tmp/nrk-example/spectrum_sweep

[params]
n_sites = 40
boundary = open

[sweep]
param = delta
grid = geometric
min = 0.5
max = 2
count = 5
";
    let cfg = parse_config_str(config, None)?;
    let manifest = run(&cfg)?;

    println!("config hash: {}", manifest.config_hash);
    for point in &manifest.points {
        println!("{}: {} ({} ms)", point.key, point.status, point.wall_ms);
    }
    println!("files written:");
    for file in &manifest.files {
        println!("  {}/{file}", cfg.output_dir.display());
    }
    Ok(())
}
