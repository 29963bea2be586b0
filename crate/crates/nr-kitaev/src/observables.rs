//! Physical diagnostics extracted from correlation matrices and
//! trajectories: densities, correlation profiles, relaxation times,
//! lengthscale fits, currents, and momentum occupations.

use crate::evolution::{propagate, state_at, TrajectoryRecord};
use crate::lattice::{
    build_obc, build_pbc_wrapped, initial_correlation, BlockCorrelation, CorrelationMatrix,
    DynamicalMatrixSet, InitialState,
};
use crate::linalg::linear_fit;
use crate::model::{Boundary, ModelParams};
use crate::{C64, Error, Result};

/// On-site densities ⟨n_j⟩ read off the normal block diagonal.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub values: Vec<f64>,
}

impl DensityProfile {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len().max(1) as f64
    }
}

/// Relaxation time to the steady state under the relative-deviation
/// criterion max_j |n_j(t) - n_j^ss| / n_j^ss < epsilon.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationResult {
    pub tau: f64,
    pub epsilon: f64,
    pub converged: bool,
}

/// Global particle and pairing currents from momentum-space sums.
#[derive(Debug, Clone, Copy)]
pub struct CurrentReport {
    /// ⟨I⟩ = -(1/N) Σ_k n_k sin k.
    pub particle_current: f64,
    /// ⟨J⟩ = -(1/N) Σ_{k>0} Re⟨c†_k c†_{-k}⟩ sin k.
    pub pairing_current: f64,
}

/// R² of each lengthscale fit; zero when the fitted signal was degenerate.
#[derive(Debug, Clone, Copy, Default)]
pub struct FitQuality {
    pub xi_nr: f64,
    pub xi_dw: f64,
    pub zeta_l: f64,
    pub zeta_r: f64,
}

/// Characteristic lengthscales of steady-state profiles: edge penetration
/// depth, density-wave envelope decay, and left/right correlation decay
/// lengths around the chain center. A degenerate fit (signal below 1e-12)
/// yields lengthscale 0 with fit quality 0.
#[derive(Debug, Clone, Copy)]
pub struct LengthscaleFits {
    pub xi_nr: f64,
    pub xi_dw: f64,
    pub zeta_l: f64,
    pub zeta_r: f64,
    pub quality: FitQuality,
}

/// Floor below which a fitted signal counts as absent.
const SIGNAL_FLOOR: f64 = 1e-12;

/// On-site density profile from the diagonal of the normal block.
pub fn density(c: &CorrelationMatrix) -> Result<DensityProfile> {
    let g = c.g();
    let mut values = Vec::with_capacity(c.n_sites());
    for j in 0..c.n_sites() {
        let z = g[[j, j]];
        if z.im.abs() > 1e-10 {
            return Err(Error::PhysicalityViolation {
                what: "complex on-site density",
                value: z.im,
            });
        }
        if !(-1e-9..=1.0 + 1e-9).contains(&z.re) {
            return Err(Error::PhysicalityViolation {
                what: "on-site density",
                value: z.re,
            });
        }
        values.push(z.re);
    }
    Ok(DensityProfile { values })
}

fn matrices_for(params: &ModelParams) -> Result<DynamicalMatrixSet> {
    match params.boundary {
        Boundary::Open => build_obc(params),
        Boundary::Periodic => build_pbc_wrapped(params),
    }
}

fn relative_deviation(c: &CorrelationMatrix, n_ss: &[f64]) -> Result<f64> {
    let n = density(c)?;
    Ok(n
        .values
        .iter()
        .zip(n_ss)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max))
}

/// First time after which the sampled relative density deviation stays
/// below `epsilon`, refined between the bracketing samples by bisection to
/// relative precision 1e-3.
pub fn relaxation_time(
    traj: &TrajectoryRecord,
    c_ss: &CorrelationMatrix,
    epsilon: f64,
) -> Result<RelaxationResult> {
    if traj.is_empty() {
        return Err(Error::InsufficientData { need: 1, got: 0 });
    }
    let n_ss = density(c_ss)?.values;
    if n_ss.iter().any(|&n| n <= 0.0) {
        return Err(Error::Undefined(
            "relative deviation with a vanishing steady-state density",
        ));
    }
    let devs: Vec<f64> = traj
        .states
        .iter()
        .map(|c| relative_deviation(c, &n_ss))
        .collect::<Result<_>>()?;
    if *devs.last().unwrap() >= epsilon {
        return Err(Error::NotConverged);
    }
    // Last sample still at or above threshold; tau lies in the next interval.
    let last_above = devs.iter().rposition(|&d| d >= epsilon);
    let i = match last_above {
        None => {
            return Ok(RelaxationResult {
                tau: 0.0,
                epsilon,
                converged: true,
            })
        }
        Some(i) => i,
    };
    let matrices = matrices_for(&traj.params)?;
    let (mut lo, mut hi) = (traj.times[i], traj.times[i + 1]);
    let anchor_t = traj.times[i];
    let anchor = &traj.states[i];
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        let c = state_at(&matrices, anchor, mid - anchor_t)?;
        if relative_deviation(&c, &n_ss)? < epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RelaxationResult {
        tau: 0.5 * (lo + hi),
        epsilon,
        converged: true,
    })
}

/// Correlations ⟨c†_{N/2} c_j⟩ of the central site with every site.
pub fn central_correlations(c: &CorrelationMatrix) -> Result<Vec<C64>> {
    if c.n_sites() % 2 != 0 {
        return Err(Error::InvalidParams(
            "central correlations need an even number of sites".into(),
        ));
    }
    Ok(c.g().row(c.n_sites() / 2).to_vec())
}

/// Exponential-decay length from points (x, signal): fits log signal
/// against x and returns (length, R²); (0, 0) when fewer than 4 points
/// carry signal above the floor or the fit does not decay.
fn decay_length(points: &[(f64, f64)]) -> (f64, f64) {
    let filtered: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, s)| *s > SIGNAL_FLOOR)
        .map(|&(x, s)| (x, s.ln()))
        .collect();
    if filtered.len() < 4 {
        return (0.0, 0.0);
    }
    let xs: Vec<f64> = filtered.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = filtered.iter().map(|p| p.1).collect();
    match linear_fit(&xs, &ys) {
        Ok((slope, _, r2)) if slope < 0.0 => (-1.0 / slope, r2),
        _ => (0.0, 0.0),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fits the steady-state lengthscales. The bulk density reference is the
/// median of the middle third; the edge-penetration depth xi_nr is fitted
/// on the left quarter, the density-wave envelope xi_dw from whichever
/// boundary carries the stronger modulation, and the correlation decay
/// lengths zeta on log|G| over [3, N/4] sites from the center.
pub fn fit_lengthscales(
    density: &DensityProfile,
    correlations: &[C64],
    params: &ModelParams,
) -> Result<LengthscaleFits> {
    let n = density.values.len();
    if n < 24 || correlations.len() != n {
        return Err(Error::InsufficientData {
            need: 24,
            got: n.min(correlations.len()),
        });
    }
    let _ = params;
    let nv = &density.values;
    let bulk = median(nv[n / 3..2 * n / 3].to_vec());

    // Edge depletion depth: how far the left-edge density deficit penetrates.
    let pts: Vec<(f64, f64)> = (0..n / 4).map(|j| (j as f64, bulk - nv[j])).collect();
    let (xi_nr, q_nr) = decay_length(&pts);

    // Density-wave envelope: local deviation from the two-site average,
    // fitted against distance from the stronger boundary.
    let env: Vec<f64> = (1..n - 1)
        .map(|j| (nv[j] - 0.5 * (nv[j - 1] + nv[j + 1])).abs())
        .collect();
    let left_sum: f64 = env[..n / 4].iter().sum();
    let right_sum: f64 = env[env.len() - n / 4..].iter().sum();
    let pts: Vec<(f64, f64)> = (0..n / 4)
        .map(|d| {
            let e = if left_sum >= right_sum {
                env[d]
            } else {
                env[env.len() - 1 - d]
            };
            (d as f64, e)
        })
        .collect();
    let (xi_dw, q_dw) = decay_length(&pts);

    let c = n / 2;
    let side = |range: Vec<usize>| {
        let pts: Vec<(f64, f64)> = range
            .into_iter()
            .map(|j| ((j as f64 - c as f64).abs(), correlations[j].norm()))
            .collect();
        decay_length(&pts)
    };
    let (zeta_l, q_l) = side((c - n / 4..=c - 3).collect());
    let (zeta_r, q_r) = side((c + 3..=c + n / 4).collect());

    Ok(LengthscaleFits {
        xi_nr,
        xi_dw,
        zeta_l,
        zeta_r,
        quality: FitQuality {
            xi_nr: q_nr,
            xi_dw: q_dw,
            zeta_l: q_l,
            zeta_r: q_r,
        },
    })
}

/// Momentum occupations n_k from the diagonal momentum blocks.
pub fn momentum_occupation(blocks: &BlockCorrelation) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(blocks.n_sites());
    for (p, &k) in blocks.grid().to_vec().iter().enumerate() {
        let z = blocks.g_entry(p, p);
        if !(-1e-9..=1.0 + 1e-9).contains(&z.re) || z.im.abs() > 1e-9 {
            return Err(Error::PhysicalityViolation {
                what: "momentum occupation",
                value: z.re,
            });
        }
        out.push((k, z.re));
    }
    Ok(out)
}

/// Global currents from the diagonal momentum blocks.
pub fn currents(blocks: &BlockCorrelation) -> Result<CurrentReport> {
    let n = blocks.n_sites() as f64;
    let occ = momentum_occupation(blocks)?;
    let particle_current = -occ.iter().map(|(k, nk)| nk * k.sin()).sum::<f64>() / n;
    let mut pairing_current = 0.0;
    for (p, &k) in blocks.grid().to_vec().iter().enumerate() {
        if k > 0.0 {
            pairing_current -= blocks.anomalous_diag(p).re * k.sin() / n;
        }
    }
    Ok(CurrentReport {
        particle_current,
        pairing_current,
    })
}

/// Real-space density profile from a full momentum-block correlation
/// matrix (inverse Fourier transform of the normal block).
pub fn pbc_density(blocks: &BlockCorrelation) -> Result<Vec<f64>> {
    let n = blocks.n_sites();
    let grid = blocks.grid().to_vec();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut z = C64::new(0.0, 0.0);
        for (p, &kp) in grid.iter().enumerate() {
            for (q, &kq) in grid.iter().enumerate() {
                let phase = C64::from_polar(1.0, -(kp - kq) * j as f64);
                z += phase * blocks.g_entry(p, q);
            }
        }
        z /= n as f64;
        if z.im.abs() > 1e-9 {
            return Err(Error::PhysicalityViolation {
                what: "complex real-space density",
                value: z.im,
            });
        }
        out.push(z.re);
    }
    Ok(out)
}

/// Directional asymmetry of the transient triggered by a central
/// excitation: (W_R - W_L)/(W_R + W_L), where W_{R/L} integrates over time
/// the excess density (relative to the same dynamics started from the
/// vacuum) summed over the sites right/left of the center.
///
/// Subtracting the vacuum-started reference removes the homogeneous
/// filling transient sourced by the noise, which is symmetric and would
/// otherwise swamp the propagating excitation.
pub fn lightcone_asymmetry(traj: &TrajectoryRecord) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: traj.len(),
        });
    }
    let n = traj.params.n_sites;
    let center = n / 2;
    let matrices = matrices_for(&traj.params)?;
    let vac = initial_correlation(&InitialState::Vacuum, n)?;
    let reference = propagate(&matrices, &vac, &traj.times, &traj.params)?;
    if reference.times != traj.times {
        return Err(Error::InvalidParams(
            "trajectory times must be sorted, deduplicated, and start at 0".into(),
        ));
    }
    let mut w_left = 0.0;
    let mut w_right = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    for i in 0..traj.len() {
        let nt = density(&traj.states[i])?.values;
        let nr = density(&reference.states[i])?.values;
        let mut left = 0.0;
        let mut right = 0.0;
        for j in 0..n {
            let excess = (nt[j] - nr[j]).abs();
            if j < center {
                left += excess;
            } else if j > center {
                right += excess;
            }
        }
        if let Some((t0, l0, r0)) = prev {
            let dt = traj.times[i] - t0;
            w_left += 0.5 * dt * (l0 + left);
            w_right += 0.5 * dt * (r0 + right);
        }
        prev = Some((traj.times[i], left, right));
    }
    if w_left + w_right < 1e-12 {
        return Err(Error::Undefined("lightcone weight vanishes"));
    }
    Ok((w_right - w_left) / (w_right + w_left))
}

/// Least-squares power law y = prefactor * x^exponent on log-log data;
/// returns (exponent, prefactor, R²).
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() < 4 || xs.len() != ys.len() {
        return Err(Error::InsufficientData {
            need: 4,
            got: xs.len().min(ys.len()),
        });
    }
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(Error::InvalidParams(
            "power-law fit requires strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&lx, &ly)?;
    Ok((slope, intercept.exp(), r2))
}
