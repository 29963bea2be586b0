//! Physical parameters of the chain and the couplings derived from them.
//!
//! The chain couples coherent hopping `w`, pairing `delta` and chemical
//! potential `mu` to two families of engineered jump operators acting on
//! bonds: hopping-type with rate `gamma_h` and phase `theta_h`, pairing-type
//! with rate `gamma_p` and phase `theta_p`. Interference between the coherent
//! and incoherent processes makes the effective left/right couplings unequal.

use crate::{C64, Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// All physical couplings plus system size and boundary condition.
///
/// `w` sets the energy unit; every derived quantity is reported in units of
/// `w` (times in `1/w`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub w: f64,
    pub delta: f64,
    pub mu: f64,
    pub gamma_h: f64,
    pub theta_h: f64,
    pub gamma_p: f64,
    pub theta_p: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl ModelParams {
    /// The coherent-pairing line used throughout the reference experiments:
    /// maximally non-reciprocal hopping, purely coherent pairing.
    pub fn coherent_pairing(delta: f64, n_sites: usize, boundary: Boundary) -> Self {
        Self {
            w: 1.0,
            delta,
            mu: 0.0,
            gamma_h: 2.0,
            theta_h: PI / 2.0,
            gamma_p: 0.0,
            theta_p: 0.0,
            n_sites,
            boundary,
        }
    }

    /// The non-reciprocal-pairing line: `gamma_p = 2 delta`, `theta_p = -pi/2`,
    /// giving pairing directed the same way as the hopping.
    pub fn nonreciprocal_pairing(delta: f64, n_sites: usize, boundary: Boundary) -> Self {
        Self {
            gamma_p: 2.0 * delta,
            theta_p: -PI / 2.0,
            ..Self::coherent_pairing(delta, n_sites, boundary)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) {
            return Err(Error::InvalidParams(format!(
                "hopping w must be positive (got {})",
                self.w
            )));
        }
        if self.delta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "pairing delta must be non-negative (got {})",
                self.delta
            )));
        }
        if self.gamma_h < 0.0 || self.gamma_p < 0.0 {
            return Err(Error::InvalidParams(format!(
                "rates must be non-negative (gamma_h = {}, gamma_p = {})",
                self.gamma_h, self.gamma_p
            )));
        }
        if self.n_sites < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 sites (got {})",
                self.n_sites
            )));
        }
        for (name, theta) in [("theta_h", self.theta_h), ("theta_p", self.theta_p)] {
            if !(-PI..=PI).contains(&theta) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in [-pi, pi] (got {theta})"
                )));
            }
        }
        if !self.are_finite() {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(())
    }

    fn are_finite(&self) -> bool {
        [
            self.w,
            self.delta,
            self.mu,
            self.gamma_h,
            self.theta_h,
            self.gamma_p,
            self.theta_p,
        ]
        .iter()
        .all(|x| x.is_finite())
    }

    /// Total single-site decay rate entering the diagonal of the dynamical matrix.
    pub fn total_rate(&self) -> f64 {
        self.gamma_h + self.gamma_p
    }
}

/// Effective directional couplings produced by coherent/incoherent interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplings {
    pub w_r: C64,
    pub w_l: C64,
    pub delta_r: C64,
    pub delta_l: C64,
}

/// w_{R/L} = w - i(Gamma_h/2) e^{∓i theta_h},
/// Delta_{R/L} = Delta ∓ i(Gamma_p/2) e^{+i theta_p}.
pub fn derive_couplings(params: &ModelParams) -> DerivedCouplings {
    let half_h = C64::new(0.0, -0.5 * params.gamma_h);
    let half_p = C64::new(0.0, -0.5 * params.gamma_p);
    let phase_h = C64::from_polar(1.0, params.theta_h);
    let phase_p = C64::from_polar(1.0, params.theta_p);
    DerivedCouplings {
        w_r: params.w + half_h * phase_h.conj(),
        w_l: params.w + half_h * phase_h,
        delta_r: params.delta + half_p * phase_p,
        delta_l: params.delta - half_p * phase_p,
    }
}

/// Momentum-resolved couplings entering the 2x2 Bloch dynamical matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumCouplings {
    pub k: f64,
    /// Tight-binding single-particle energy xi_k = -(2 w cos k + mu).
    pub xi: f64,
    /// Hopping dissipation rate Gamma_h [1 + cos(k + theta_h)], in [0, 2 Gamma_h].
    pub gamma_h_k: f64,
    /// Pairing dissipation amplitude Gamma_p e^{i theta_p} cos k.
    pub gamma_p_k: C64,
}

pub fn momentum_couplings(params: &ModelParams, k: f64) -> Result<MomentumCouplings> {
    if params.boundary != Boundary::Periodic {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Periodic,
        });
    }
    Ok(MomentumCouplings {
        k,
        xi: -(2.0 * params.w * k.cos() + params.mu),
        gamma_h_k: params.gamma_h * (1.0 + (k + params.theta_h).cos()),
        gamma_p_k: C64::from_polar(params.gamma_p, params.theta_p) * k.cos(),
    })
}

/// Quasi-momenta 2 pi n / N for n = 1..N, folded into (-pi, pi].
pub fn momentum_grid(n_sites: usize) -> Vec<f64> {
    (1..=n_sites)
        .map(|n| {
            let k = 2.0 * PI * n as f64 / n_sites as f64;
            if k > PI + 1e-12 {
                k - 2.0 * PI
            } else {
                k
            }
        })
        .collect()
}

/// Position of -k in the grid returned by [`momentum_grid`].
///
/// Grid entry `i` holds k = 2 pi (i+1)/N; its negative (mod 2 pi) is entry
/// N-2-i, except k = 0 and k = pi which map to themselves.
pub fn negated_index(i: usize, n_sites: usize) -> usize {
    if i == n_sites - 1 {
        n_sites - 1
    } else {
        n_sites - 2 - i
    }
}
