//! Directional spreading of a single injected particle.
//!
//! Injects one particle at the chain center on top of the vacuum, propagates
//! the correlation matrix, and integrates the excess density (relative to a
//! vacuum-started reference) on each side of the injection site. The
//! normalized left/right weight difference is the light-cone asymmetry:
//! close to +1 when transport is one-way, near 0 when strong coherent
//! pairing restores symmetric spreading.

use nr_kitaev::model::{Boundary, ModelParams};
use nr_kitaev::{build_obc, initial_correlation, lightcone_asymmetry, propagate, InitialState};

fn main() -> nr_kitaev::Result<()> {
    let n = 60;
    let times: Vec<f64> = (1..=40).map(|i| 6.0 * i as f64 / 40.0).collect();
    let cases = [
        ("weak coherent pairing", ModelParams::coherent_pairing(0.1, n, Boundary::Open)),
        ("weak non-reciprocal pairing", ModelParams::nonreciprocal_pairing(0.1, n, Boundary::Open)),
        ("strong coherent pairing", ModelParams::coherent_pairing(10.0, n, Boundary::Open)),
        ("strong non-reciprocal pairing", ModelParams::nonreciprocal_pairing(10.0, n, Boundary::Open)),
    ];
    println!("{:>32} {:>10}", "regime", "asymmetry");
    for (label, params) in cases {
        let matrices = build_obc(&params)?;
        let c0 = initial_correlation(&InitialState::SingleParticle(n / 2), n)?;
        let traj = propagate(&matrices, &c0, &times, &params)?;
        let a = lightcone_asymmetry(&traj)?;
        println!("{label:>32} {a:10.4}");
    }
    Ok(())
}
