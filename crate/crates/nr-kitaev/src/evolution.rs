//! Time evolution and steady states of the correlation matrix.
//!
//! The steady state solves the dense Sylvester equation H C - C H+ = -i F
//! through a Schur decomposition (O(N^3)); trajectories use the exponential
//! sandwich C(t) = e^{-iHt} (C0 - Css) e^{+iH+t} + Css. The full (2N)^2
//! superoperator is only ever materialized as a small-N cross-check.

use crate::lattice::{BlockCorrelation, CorrelationMatrix, DynamicalMatrixSet};
use crate::linalg::{self, conj_transpose, expm, identity, kron, one_norm, vec_col};
use crate::model::{momentum_grid, Boundary, ModelParams};
use crate::{C64, Error, Result};
use ndarray::{Array1, Array2};

/// Snapshots of a propagated correlation matrix.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<CorrelationMatrix>,
    pub params: ModelParams,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Multiset of superoperator rates {E_n - E_m*}.
#[derive(Debug, Clone)]
pub struct SuperoperatorSpectrum {
    pub values: Vec<C64>,
    /// Eigenvector condition number exceeded 1e8: the dynamical matrix is
    /// close to defective (exceptional point) and the pair decomposition is
    /// approximate.
    pub near_defective: bool,
}

/// Relative threshold below which a superoperator rate counts as zero.
const RATE_TOL: f64 = 1e-12;
/// Eigenvector condition number marking a near-defective dynamical matrix.
const DEFECT_COND: f64 = 1e8;

fn min_rate(eigenvalues: &[C64]) -> f64 {
    let mut min = f64::INFINITY;
    for &en in eigenvalues {
        for &em in eigenvalues {
            min = min.min((en - em.conj()).norm());
        }
    }
    min
}

/// Steady state of dC/dt = -i(H C - C H+) + F via the Sylvester equation.
pub fn steady_state(matrices: &DynamicalMatrixSet) -> Result<CorrelationMatrix> {
    let rhs = matrices.f.mapv(|z| C64::new(0.0, -1.0) * z);
    let (x, eigenvalues) = linalg::sylvester_h_hdag(&matrices.h, &rhs)?;
    if min_rate(&eigenvalues) < RATE_TOL * one_norm(&matrices.h).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularDynamics);
    }
    // The exact solution is Hermitian; symmetrize away roundoff.
    let herm = (&x + &conj_transpose(&x)).mapv(|z| 0.5 * z);
    Ok(CorrelationMatrix::from_data(herm))
}

/// Steady state, treating noiseless singular dynamics as the vacuum.
fn steady_state_or_vacuum(matrices: &DynamicalMatrixSet) -> Result<CorrelationMatrix> {
    match steady_state(matrices) {
        Ok(c) => Ok(c),
        Err(Error::SingularDynamics) if matrices.noise_is_zero() => {
            Ok(CorrelationMatrix::zero(matrices.n_sites))
        }
        Err(e) => Err(e),
    }
}

fn merged_times(times: &[f64]) -> Result<Vec<f64>> {
    let mut full = Vec::with_capacity(times.len() + 1);
    full.push(0.0);
    for &t in times {
        let last = *full.last().unwrap();
        if t < last {
            return Err(Error::InvalidParams(
                "propagation times must be sorted and non-negative".into(),
            ));
        }
        if t > last {
            full.push(t);
        }
    }
    Ok(full)
}

/// Propagate a correlation matrix to the requested times (sorted,
/// non-negative). A t = 0 snapshot is always included first.
pub fn propagate(
    matrices: &DynamicalMatrixSet,
    c0: &CorrelationMatrix,
    times: &[f64],
    params: &ModelParams,
) -> Result<TrajectoryRecord> {
    let css = steady_state_or_vacuum(matrices)?;
    let full = merged_times(times)?;
    let mut deviation = c0.data() - css.data();
    let mut states = Vec::with_capacity(full.len());
    states.push(c0.clone());
    for w in full.windows(2) {
        let dt = w[1] - w[0];
        let prop = expm(&matrices.h.mapv(|z| C64::new(0.0, -dt) * z))?;
        deviation = prop.dot(&deviation).dot(&conj_transpose(&prop));
        states.push(CorrelationMatrix::from_data(&deviation + css.data()));
    }
    Ok(TrajectoryRecord {
        times: full,
        states,
        params: params.clone(),
    })
}

/// Single-shot state at time t (one exponential from t = 0).
pub fn state_at(
    matrices: &DynamicalMatrixSet,
    c0: &CorrelationMatrix,
    t: f64,
) -> Result<CorrelationMatrix> {
    let css = steady_state_or_vacuum(matrices)?;
    let prop = expm(&matrices.h.mapv(|z| C64::new(0.0, -t) * z))?;
    let deviation = prop
        .dot(&(c0.data() - css.data()))
        .dot(&conj_transpose(&prop));
    Ok(CorrelationMatrix::from_data(&deviation + css.data()))
}

/// Per-momentum steady state: solves the 2x2 Sylvester problem
/// h_k C_k - C_k h_k+ = -i f_kk for every grid momentum. Off-diagonal
/// momentum blocks carry no noise and relax to zero.
pub fn steady_state_pbc(params: &ModelParams) -> Result<BlockCorrelation> {
    if params.boundary != Boundary::Periodic {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Periodic,
        });
    }
    let n = params.n_sites;
    let mut blocks = BlockCorrelation::zero(n);
    let id = identity(2);
    for (a, &k) in momentum_grid(n).iter().enumerate() {
        let b = crate::lattice::build_bloch(params, k)?;
        let ev = linalg::eigvals(&b.h_k)?;
        if min_rate(&ev) < RATE_TOL * one_norm(&b.h_k).max(f64::MIN_POSITIVE) {
            // A dark momentum mode is only acceptable when nothing sources
            // it; its steady block is then the vacuum.
            if linalg::max_abs(&b.f_k) == 0.0 {
                continue;
            }
            return Err(Error::SingularDynamics);
        }
        let a_mat = kron(&id, &b.h_k) - kron(&b.h_k.mapv(|z| z.conj()), &id);
        let rhs = vec_col(&b.f_k.mapv(|z| C64::new(0.0, -1.0) * z));
        let rhs2 = Array2::from_shape_vec((4, 1), rhs.to_vec()).expect("4-vector");
        let sol = linalg::solve_matrix(&a_mat, &rhs2)?;
        let c_k = linalg::unvec_col(&sol.column(0).to_owned(), 2, 2);
        blocks.set_block(a, a, &c_k);
    }
    Ok(blocks)
}

/// Evolve all momentum blocks: block (p, q) follows the 2x2 sandwich with
/// the per-momentum propagators; noise enters the diagonal blocks only.
pub fn propagate_pbc_blocks(
    params: &ModelParams,
    blocks0: &BlockCorrelation,
    times: &[f64],
) -> Result<Vec<(f64, BlockCorrelation)>> {
    let n = params.n_sites;
    let grid = momentum_grid(n);
    let steady = steady_state_pbc(params)?;
    let full = merged_times(times)?;

    // Deviations from the (block-diagonal) steady state.
    let mut dev: Vec<Array2<C64>> = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            dev.push(&blocks0.block_owned(p, q) - &steady.block_owned(p, q));
        }
    }

    let h_k: Vec<Array2<C64>> = grid
        .iter()
        .map(|&k| crate::lattice::build_bloch(params, k).map(|b| b.h_k))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(full.len());
    let snapshot = |dev: &[Array2<C64>], t: f64, out: &mut Vec<(f64, BlockCorrelation)>| {
        let mut blocks = BlockCorrelation::zero(n);
        for p in 0..n {
            for q in 0..n {
                blocks.set_block(p, q, &(&dev[p * n + q] + &steady.block_owned(p, q)));
            }
        }
        out.push((t, blocks));
    };
    snapshot(&dev, 0.0, &mut out);

    for w in full.windows(2) {
        let dt = w[1] - w[0];
        let props: Vec<Array2<C64>> = h_k
            .iter()
            .map(|h| expm(&h.mapv(|z| C64::new(0.0, -dt) * z)))
            .collect::<Result<_>>()?;
        let props_dag: Vec<Array2<C64>> = props.iter().map(conj_transpose).collect();
        for p in 0..n {
            for q in 0..n {
                dev[p * n + q] = props[p].dot(&dev[p * n + q]).dot(&props_dag[q]);
            }
        }
        snapshot(&dev, w[1], &mut out);
    }
    Ok(out)
}

/// All pairwise rates E_n - E_m* of the dynamical matrix.
pub fn superoperator_spectrum(h: &Array2<C64>) -> Result<SuperoperatorSpectrum> {
    let (vals, vecs) = linalg::eig(h)?;
    let near_defective = match linalg::cond2(&vecs) {
        Ok(c) => c > DEFECT_COND,
        Err(_) => true,
    };
    let mut values = Vec::with_capacity(vals.len() * vals.len());
    for &en in &vals {
        for &em in &vals {
            values.push(en - em.conj());
        }
    }
    Ok(SuperoperatorSpectrum {
        values,
        near_defective,
    })
}

/// Densely vectorized superoperator 1 (x) H - H* (x) 1 and vec(F), in
/// column-stacking convention. Small-N cross-check only.
pub fn vectorized_superoperator(
    h: &Array2<C64>,
    f: &Array2<C64>,
) -> Result<(Array2<C64>, Array1<C64>)> {
    let n = h.nrows() / 2;
    if n > 8 {
        return Err(Error::SizeGuard { n, max: 8 });
    }
    let id = identity(h.nrows());
    let sup = kron(&id, h) - kron(&h.mapv(|z| z.conj()), &id);
    Ok((sup, vec_col(f)))
}

/// Geometrically spaced time grid (t_min and t_max included).
pub fn geometric_times(t_min: f64, t_max: f64, n_points: usize) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && n_points >= 2);
    let ratio = (t_max / t_min).ln() / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| t_min * (ratio * i as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{
        build_obc, build_pbc_wrapped, initial_correlation, pbc_block_correlation, InitialState,
    };
    use crate::linalg::max_abs;
    use crate::model::ModelParams;
    use crate::oracle;

    fn residual(mats: &DynamicalMatrixSet, c: &CorrelationMatrix) -> f64 {
        let lhs = mats.h.dot(c.data()) - c.data().dot(&conj_transpose(&mats.h));
        let rhs = mats.f.mapv(|z| C64::new(0.0, -1.0) * z);
        max_abs(&(&lhs - &rhs))
    }

    #[test]
    fn steady_state_is_vacuum_without_noise() {
        let p = ModelParams::coherent_pairing(0.0, 6, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let c = steady_state(&m).unwrap();
        assert!(max_abs(c.data()) < 1e-12);
    }

    #[test]
    fn steady_state_residual_and_oracle_match() {
        // N=3, Delta=0.5, coherent pairing: compare against the null vector
        // of the full Liouvillian.
        let p = ModelParams::coherent_pairing(0.5, 3, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let c = steady_state(&m).unwrap();
        assert!(residual(&m, &c) < 1e-10 * max_abs(&m.f).max(1.0));
        c.validate(1e-9).unwrap();

        let fock = oracle::FockSpace::new(3).unwrap();
        let lv = oracle::liouvillian_for(&fock, &p);
        let (rho_ss, degenerate) = oracle::steady_state_exact(&lv).unwrap();
        assert!(!degenerate);
        let exact = oracle::correlations_exact(&fock, &rho_ss);
        assert!(c.max_deviation(&exact) < 1e-8);
    }

    #[test]
    fn steady_state_flat_quarter_density_at_critical_point() {
        let p = ModelParams::nonreciprocal_pairing(1.0, 30, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let c = steady_state(&m).unwrap();
        for j in 0..30 {
            assert!((c.g()[[j, j]].re - 0.25).abs() < 1e-3, "site {j}");
        }
    }

    #[test]
    fn singular_dynamics_detected() {
        // No dissipation at all: every E_n - E_n* = 0. With pairing the
        // noise is nonzero and no steady state exists.
        let p = ModelParams {
            gamma_h: 0.0,
            gamma_p: 0.0,
            ..ModelParams::coherent_pairing(0.5, 4, Boundary::Open)
        };
        let m = build_obc(&p).unwrap();
        assert!(matches!(steady_state(&m), Err(Error::SingularDynamics)));
        let c0 = initial_correlation(&InitialState::SingleParticle(1), 4).unwrap();
        assert!(matches!(
            propagate(&m, &c0, &[0.5], &p),
            Err(Error::SingularDynamics)
        ));

        // Without pairing the dynamics is noiseless and purely unitary;
        // propagation falls back to the homogeneous part.
        let p2 = ModelParams {
            gamma_h: 0.0,
            ..ModelParams::coherent_pairing(0.0, 4, Boundary::Open)
        };
        let m2 = build_obc(&p2).unwrap();
        assert!(m2.noise_is_zero());
        let traj = propagate(&m2, &c0, &[0.5], &p2).unwrap();
        assert_eq!(traj.len(), 2);
        // Unitary dynamics preserves particle number.
        let tr: f64 = (0..4).map(|j| traj.states[1].g()[[j, j]].re).sum();
        assert!((tr - 1.0).abs() < 1e-10);
    }

    #[test]
    fn propagate_identity_at_zero_and_relaxation() {
        let p = ModelParams::nonreciprocal_pairing(0.6, 8, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let c0 = initial_correlation(&InitialState::SingleParticle(4), 8).unwrap();
        let traj = propagate(&m, &c0, &[0.0, 1.0, 30.0], &p).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert!(traj.states[0].max_deviation(&c0) == 0.0);
        let css = steady_state(&m).unwrap();
        assert!(traj.states.last().unwrap().max_deviation(&css) < 1e-8);
        for s in &traj.states {
            s.validate(1e-9).unwrap();
        }
    }

    #[test]
    fn pure_loss_particle_number_decays() {
        let p = ModelParams::coherent_pairing(0.0, 6, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let c0 = initial_correlation(&InitialState::SingleParticle(2), 6).unwrap();
        // Long horizon: the non-normal hopping produces polynomial-in-t
        // transients on top of the exponential loss.
        let times: Vec<f64> = (1..=25).map(|i| 0.4 * i as f64).collect();
        let traj = propagate(&m, &c0, &times, &p).unwrap();
        let mut prev = 1.0;
        for s in traj.states.iter().skip(1) {
            let tr: f64 = (0..6).map(|j| s.g()[[j, j]].re).sum();
            assert!(tr < prev + 1e-12);
            prev = tr;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn semigroup_and_linearity() {
        let p = ModelParams::nonreciprocal_pairing(0.8, 6, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let ca = initial_correlation(&InitialState::SingleParticle(2), 6).unwrap();
        let cb = initial_correlation(&InitialState::Product(vec![true; 6]), 6).unwrap();

        // Semigroup: 0 -> 0.7 directly vs through 0.3.
        let direct = state_at(&m, &ca, 0.7).unwrap();
        let mid = state_at(&m, &ca, 0.3).unwrap();
        let chained = state_at(&m, &mid, 0.4).unwrap();
        assert!(direct.max_deviation(&chained) < 1e-9);

        // Linearity of the affine map on convex combinations.
        let alpha = 0.37;
        let mix_data = ca.data().mapv(|z| z * alpha) + cb.data().mapv(|z| z * (1.0 - alpha));
        let mix = CorrelationMatrix::from_data(mix_data);
        let evolved_mix = state_at(&m, &mix, 0.5).unwrap();
        let ea = state_at(&m, &ca, 0.5).unwrap();
        let eb = state_at(&m, &cb, 0.5).unwrap();
        let combo =
            ea.data().mapv(|z| z * alpha) + eb.data().mapv(|z| z * (1.0 - alpha));
        assert!(max_abs(&(evolved_mix.data() - &combo)) < 1e-10);
    }

    #[test]
    fn trajectory_matches_oracle_obc() {
        let p = ModelParams {
            mu: 0.2,
            ..ModelParams::nonreciprocal_pairing(0.7, 3, Boundary::Open)
        };
        let m = build_obc(&p).unwrap();
        let state = InitialState::SingleParticle(1);
        let c0 = initial_correlation(&state, 3).unwrap();
        let fock = oracle::FockSpace::new(3).unwrap();
        let lv = oracle::liouvillian_for(&fock, &p);
        let rho0 = fock.product_density(&state.occupations(3).unwrap()).unwrap();
        let times = [0.1, 0.5, 2.0, 10.0];
        let traj = propagate(&m, &c0, &times, &p).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let rho = oracle::evolve_exact(&rho0, &lv, t).unwrap();
            let exact = oracle::correlations_exact(&fock, &rho);
            assert!(
                traj.states[i + 1].max_deviation(&exact) < 1e-8,
                "t = {t}"
            );
        }
    }

    #[test]
    fn trajectory_matches_oracle_pbc() {
        let p = ModelParams::nonreciprocal_pairing(0.5, 4, Boundary::Periodic);
        let m = build_pbc_wrapped(&p).unwrap();
        let state = InitialState::Product(vec![true, false, true, false]);
        let c0 = initial_correlation(&state, 4).unwrap();
        let fock = oracle::FockSpace::new(4).unwrap();
        let lv = oracle::liouvillian_for(&fock, &p);
        let rho0 = fock.product_density(&state.occupations(4).unwrap()).unwrap();
        let traj = propagate(&m, &c0, &[0.3, 1.5], &p).unwrap();
        for (i, &t) in [0.3, 1.5].iter().enumerate() {
            let rho = oracle::evolve_exact(&rho0, &lv, t).unwrap();
            let exact = oracle::correlations_exact(&fock, &rho);
            assert!(traj.states[i + 1].max_deviation(&exact) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn pbc_blocks_match_wrapped_real_space() {
        // Fourier-reconstructed density from block propagation must agree
        // with the real-space wrapped propagation.
        let p = ModelParams::nonreciprocal_pairing(0.4, 6, Boundary::Periodic);
        let m = build_pbc_wrapped(&p).unwrap();
        let state = InitialState::SingleParticle(3);
        let c0 = initial_correlation(&state, 6).unwrap();
        let blocks0 = pbc_block_correlation(&state, 6).unwrap();
        let t = 0.8;
        let traj = propagate(&m, &c0, &[t], &p).unwrap();
        let block_traj = propagate_pbc_blocks(&p, &blocks0, &[t]).unwrap();
        let blocks_t = &block_traj.last().unwrap().1;
        let grid = momentum_grid(6);
        for j in 0..6 {
            let mut njk = C64::new(0.0, 0.0);
            for pi in 0..6 {
                for qi in 0..6 {
                    let ph = C64::from_polar(1.0, -(grid[pi] - grid[qi]) * j as f64);
                    njk += ph * blocks_t.g_entry(pi, qi) / 6.0;
                }
            }
            let nj = traj.states[1].g()[[j, j]];
            assert!((njk - nj).norm() < 1e-9, "site {j}: {njk} vs {nj}");
        }
    }

    #[test]
    fn pbc_blocks_relax_to_per_k_steady_state() {
        let p = ModelParams::nonreciprocal_pairing(0.9, 5, Boundary::Periodic);
        let blocks0 = pbc_block_correlation(&InitialState::Vacuum, 5).unwrap();
        let late = propagate_pbc_blocks(&p, &blocks0, &[40.0]).unwrap();
        let steady = steady_state_pbc(&p).unwrap();
        for a in 0..5 {
            let diff = max_abs(&(&late.last().unwrap().1.block_owned(a, a)
                - &steady.block_owned(a, a)));
            assert!(diff < 1e-9);
        }
    }

    #[test]
    fn pbc_steady_state_self_consistency() {
        // Eq. relating n_k to the anomalous correlator at stationarity,
        // derived from the G equation of motion (constant term Gamma_p).
        let p = ModelParams::nonreciprocal_pairing(0.8, 8, Boundary::Periodic);
        let blocks = steady_state_pbc(&p).unwrap();
        let grid = momentum_grid(8);
        for (a, &k) in grid.iter().enumerate() {
            let mk = crate::model::momentum_couplings(&p, k).unwrap();
            let nk = blocks.g_entry(a, a).re;
            let fk = blocks.anomalous_diag(a);
            let num = p.gamma_p + 4.0 * p.delta * k.sin() * fk.re
                - 2.0 * (mk.gamma_p_k * fk).re;
            let den = 2.0 * (mk.gamma_h_k + p.gamma_p);
            assert!((nk - num / den).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn pbc_steady_density_is_homogeneous() {
        let p = ModelParams::coherent_pairing(1.3, 10, Boundary::Periodic);
        let blocks = steady_state_pbc(&p).unwrap();
        let grid = momentum_grid(10);
        let mut densities = Vec::new();
        for j in 0..10 {
            let mut nj = C64::new(0.0, 0.0);
            for pi in 0..10 {
                for qi in 0..10 {
                    let ph = C64::from_polar(1.0, -(grid[pi] - grid[qi]) * j as f64);
                    nj += ph * blocks.g_entry(pi, qi) / 10.0;
                }
            }
            densities.push(nj.re);
        }
        let mean: f64 = densities.iter().sum::<f64>() / 10.0;
        for d in densities {
            assert!((d - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn continuity_equation_along_trajectory() {
        // Finite-difference d<n_l>/dt against the analytic right-hand side
        // for Gamma_h = 2w, theta_h = pi/2, theta_p = -pi/2, derived from
        // the certified equation of motion:
        // dn_l/dt = -4w I_{l-1} - (2D - Gp) J_l - (2D + Gp) J_{l-1}
        //           - 2(2w + Gp) n_l + Gp.
        let p = ModelParams::nonreciprocal_pairing(0.7, 8, Boundary::Periodic);
        let m = build_pbc_wrapped(&p).unwrap();
        let c0 = initial_correlation(&InitialState::SingleParticle(4), 8).unwrap();
        let t = 0.3;
        let dt = 1e-4;
        let minus = state_at(&m, &c0, t - dt).unwrap();
        let mid = state_at(&m, &c0, t).unwrap();
        let plus = state_at(&m, &c0, t + dt).unwrap();
        let n = 8;
        for l in 0..n {
            let lp = (l + 1) % n;
            let lm = (l + n - 1) % n;
            let fd = (plus.g()[[l, l]].re - minus.g()[[l, l]].re) / (2.0 * dt);
            let i_prev = -mid.g()[[lm, l]].im;
            let j_here = -mid.f()[[l, lp]].im;
            let j_prev = -mid.f()[[lm, l]].im;
            let rhs = -4.0 * p.w * i_prev - (2.0 * p.delta - p.gamma_p) * j_here
                - (2.0 * p.delta + p.gamma_p) * j_prev
                - 2.0 * (2.0 * p.w + p.gamma_p) * mid.g()[[l, l]].re
                + p.gamma_p;
            assert!((fd - rhs).abs() < 1e-5, "site {l}: {fd} vs {rhs}");
        }
    }

    #[test]
    fn superoperator_spectrum_pairs() {
        // Diagonal 2x2 check.
        let h = ndarray::array![
            [C64::new(1.0, -0.5), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-2.0, -1.0)]
        ];
        let s = superoperator_spectrum(&h).unwrap();
        let mut expect = vec![
            C64::new(0.0, -1.0),
            C64::new(3.0, -1.5),
            C64::new(-3.0, -1.5),
            C64::new(0.0, -2.0),
        ];
        let mut got = s.values.clone();
        let key = |z: &C64| (z.re, z.im);
        expect.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (a, b) in got.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(!s.near_defective);
    }

    #[test]
    fn superoperator_matches_kronecker() {
        // Generic, well-conditioned parameters: on the fully non-reciprocal
        // line the matrix is nearly defective and eigensolvers only agree to
        // ~eps^(1/N).
        let p = ModelParams {
            w: 0.9,
            delta: 0.4,
            mu: 0.15,
            gamma_h: 1.3,
            theta_h: 0.7,
            gamma_p: 0.5,
            theta_p: 1.9,
            n_sites: 4,
            boundary: Boundary::Open,
        };
        let m = build_obc(&p).unwrap();
        let s = superoperator_spectrum(&m.h).unwrap();
        let (sup, _) = vectorized_superoperator(&m.h, &m.f).unwrap();
        // Eigenvalues of i * sup? The superoperator generator is -i * sup
        // acting as dC/dt = -i sup vec C + vec F; its eigenvalues are
        // -i (E_n - E_m*). Compare the pair multiset with eig(sup).
        let mut dense: Vec<C64> = linalg::eigvals(&sup).unwrap();
        let mut pairs = s.values.clone();
        for v in &pairs {
            let (idx, dist) = dense
                .iter()
                .enumerate()
                .map(|(i, d)| (i, (d - v).norm()))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            assert!(dist < 1e-10, "{v} unmatched ({dist:.2e})");
            dense.swap_remove(idx);
        }
        pairs.clear();
    }

    #[test]
    fn exceptional_point_flagged_and_rates_cluster() {
        let p = ModelParams::nonreciprocal_pairing(1.0, 20, Boundary::Open);
        let m = build_obc(&p).unwrap();
        let s = superoperator_spectrum(&m.h).unwrap();
        assert!(s.near_defective);
        // All rates at -4i(w + Delta) = -8i.
        for v in &s.values {
            assert!((v - C64::new(0.0, -8.0)).norm() < 1e-5, "{v}");
        }
        // Steady state remains well-posed at the EP.
        assert!(steady_state(&m).is_ok());
    }

    #[test]
    fn vectorized_superoperator_steady_state() {
        let p = ModelParams {
            mu: -0.1,
            ..ModelParams::nonreciprocal_pairing(0.45, 3, Boundary::Open)
        };
        let m = build_obc(&p).unwrap();
        let (sup, vf) = vectorized_superoperator(&m.h, &m.f).unwrap();
        assert_eq!(sup.nrows(), 36);
        let rhs = Array2::from_shape_vec(
            (36, 1),
            vf.iter().map(|z| C64::new(0.0, -1.0) * z).collect(),
        )
        .unwrap();
        let sol = linalg::solve_matrix(&sup, &rhs).unwrap();
        let c_vec = linalg::unvec_col(&sol.column(0).to_owned(), 6, 6);
        let c_syl = steady_state(&m).unwrap();
        assert!(max_abs(&(&c_vec - c_syl.data())) < 1e-10);
    }

    #[test]
    fn vectorized_superoperator_size_guard() {
        let p = ModelParams::coherent_pairing(0.1, 9, Boundary::Open);
        let m = build_obc(&p).unwrap();
        assert!(matches!(
            vectorized_superoperator(&m.h, &m.f),
            Err(Error::SizeGuard { n: 9, max: 8 })
        ));
    }

    #[test]
    fn geometric_grid() {
        let g = geometric_times(0.01, 10.0, 4);
        assert_eq!(g.len(), 4);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[3] - 10.0).abs() < 1e-12);
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-10);
    }
}
