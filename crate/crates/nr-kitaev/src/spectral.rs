//! Spectra of the dynamical matrix and the transition diagnostics derived
//! from them: real-axis gap, imaginary bandwidth, zero modes, exceptional
//! points, and the slowest-decaying momentum.

use ndarray::Array2;
use rayon::prelude::*;

use crate::linalg::{cond2, eig, one_norm};
use crate::model::{momentum_grid, Boundary, ModelParams};
use crate::{lattice, C64, Error, Result};

/// Fixed momentum-grid resolution used by [`kstar`], independent of the
/// system size carried by the parameter set.
pub const KSTAR_GRID: usize = 400;

/// Thresholds used to classify a spectrum. All defaults scale with the
/// hopping amplitude `w`, the natural energy unit of the chain.
#[derive(Debug, Clone, Copy)]
pub struct SpectralTolerances {
    /// A real-axis gap larger than this counts as open.
    pub gap_tol: f64,
    /// Eigenvalues with |Re E| below this count as zero modes and are
    /// excluded when measuring the gap window.
    pub zero_tol: f64,
    /// An imaginary bandwidth smaller than this counts as collapsed.
    pub bw_tol: f64,
    /// Eigenvalue cluster radius below `ep_radius_rel * ||H||_1` is required
    /// for the exceptional-point flag.
    pub ep_radius_rel: f64,
    /// Eigenvector-matrix 2-norm condition number above this is required for
    /// the exceptional-point flag.
    pub ep_cond: f64,
}

impl SpectralTolerances {
    pub fn for_hopping(w: f64) -> Self {
        Self {
            // Half the asymptotic gap 2w: well above the finite-size level
            // spacing of the gapless phase at accessible sizes, well below
            // the open-phase plateau, so the onset estimate is sharp.
            gap_tol: w,
            // Zero modes are exponentially split in N, but dense
            // eigensolvers scatter their real parts by up to ~1e-4 w on
            // this strongly non-normal matrix; 1e-3 w absorbs that.
            zero_tol: 1e-3 * w,
            bw_tol: 1e-3 * w,
            ep_radius_rel: 1e-6,
            ep_cond: 1e8,
        }
    }
}

/// Full eigenvalue multiset of the dynamical matrix plus the derived
/// transition diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<C64>,
    /// Half-width of the empty window around Re E = 0 (zero modes
    /// excluded). With particle-hole symmetry this is the distance from the
    /// axis to the band edge, the gap plotted in spectral phase diagrams;
    /// zero when either side of the axis is unoccupied.
    pub real_gap: f64,
    /// max Im E - min Im E.
    pub imag_bandwidth: f64,
    /// Number of eigenvalues with |Re E| < zero_tol.
    pub zero_mode_count: usize,
    /// True when the whole spectrum clusters to a point and the eigenvector
    /// basis is numerically degenerate.
    pub ep_flag: bool,
    /// Radius of the smallest disc around the eigenvalue mean containing the
    /// whole spectrum.
    pub ep_cluster_radius: f64,
    /// Slowest-decaying momentum; only populated for periodic boundaries.
    pub kstar: Option<f64>,
}

fn summarize(
    eigenvalues: Vec<C64>,
    eigvec_cond: f64,
    h_norm: f64,
    kstar: Option<f64>,
    tol: &SpectralTolerances,
) -> SpectralSummary {
    let mut pos_min = f64::INFINITY;
    let mut neg_max = f64::NEG_INFINITY;
    let mut zero_mode_count = 0;
    let mut im_min = f64::INFINITY;
    let mut im_max = f64::NEG_INFINITY;
    for e in &eigenvalues {
        if e.re.abs() < tol.zero_tol {
            zero_mode_count += 1;
        } else if e.re > 0.0 {
            pos_min = pos_min.min(e.re);
        } else {
            neg_max = neg_max.max(e.re);
        }
        im_min = im_min.min(e.im);
        im_max = im_max.max(e.im);
    }
    let real_gap = if pos_min.is_finite() && neg_max.is_finite() {
        0.5 * (pos_min - neg_max)
    } else {
        0.0
    };
    let imag_bandwidth = if eigenvalues.is_empty() {
        0.0
    } else {
        im_max - im_min
    };
    let mean = eigenvalues.iter().sum::<C64>() / eigenvalues.len().max(1) as f64;
    let ep_cluster_radius = eigenvalues
        .iter()
        .map(|e| (e - mean).norm())
        .fold(0.0, f64::max);
    let ep_flag = ep_cluster_radius < tol.ep_radius_rel * h_norm && eigvec_cond > tol.ep_cond;
    SpectralSummary {
        eigenvalues,
        real_gap,
        imag_bandwidth,
        zero_mode_count,
        ep_flag,
        ep_cluster_radius,
        kstar,
    }
}

fn spectrum_of(h: &Array2<C64>, kstar: Option<f64>, tol: &SpectralTolerances) -> Result<SpectralSummary> {
    let (values, vectors) = eig(h)?;
    let cond = cond2(&vectors)?;
    Ok(summarize(values, cond, one_norm(h), kstar, tol))
}

/// Spectrum of the open-chain dynamical matrix with default tolerances.
pub fn obc_spectrum(params: &ModelParams) -> Result<SpectralSummary> {
    obc_spectrum_with(params, &SpectralTolerances::for_hopping(params.w))
}

pub fn obc_spectrum_with(
    params: &ModelParams,
    tol: &SpectralTolerances,
) -> Result<SpectralSummary> {
    let matrices = lattice::build_obc(params)?;
    spectrum_of(&matrices.h, None, tol)
}

/// Spectrum of the periodic chain assembled from the Bloch blocks on the
/// chain's own momentum grid, with the slowest-decaying momentum attached.
pub fn pbc_spectrum(params: &ModelParams) -> Result<SpectralSummary> {
    pbc_spectrum_with(params, &SpectralTolerances::for_hopping(params.w))
}

pub fn pbc_spectrum_with(
    params: &ModelParams,
    tol: &SpectralTolerances,
) -> Result<SpectralSummary> {
    if params.boundary != Boundary::Periodic {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Periodic,
        });
    }
    params.validate()?;
    let mut values = Vec::with_capacity(2 * params.n_sites);
    let mut cond_max: f64 = 0.0;
    let mut norm_max: f64 = 0.0;
    for k in momentum_grid(params.n_sites) {
        let blocks = lattice::build_bloch(params, k)?;
        let (v, vec) = eig(&blocks.h_k)?;
        values.extend(v);
        cond_max = cond_max.max(cond2(&vec)?);
        norm_max = norm_max.max(one_norm(&blocks.h_k));
    }
    let ks = kstar(params)?;
    Ok(summarize(values, cond_max, norm_max, Some(ks), tol))
}

/// Closed-form Bloch eigenvalue pair h_k^± with a principal-branch square
/// root. The unordered pair is branch-invariant; [`bloch_bands_continuous`]
/// resolves the branch along a momentum path.
pub fn bloch_spectrum_analytic(params: &ModelParams, k: f64) -> Result<(C64, C64)> {
    params.validate()?;
    if params.boundary != Boundary::Periodic {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Periodic,
        });
    }
    let i = C64::new(0.0, 1.0);
    let (sk, ck) = k.sin_cos();
    let xi = -(2.0 * params.w * ck + params.mu);
    let gh = params.gamma_h;
    let gp = params.gamma_p;
    let prefix = -i * (gh * (1.0 + ck * params.theta_h.cos()) + gp);
    let gh_odd = gh * params.theta_h.sin() * sk;
    let rad = C64::new(
        xi * xi + 4.0 * params.delta * params.delta * sk * sk - gp * gp * ck * ck,
        4.0 * params.delta * gp * params.theta_p.sin() * sk * ck,
    ) - gh_odd * C64::new(gh_odd, 2.0 * xi);
    let root = rad.sqrt();
    Ok((prefix + root, prefix - root))
}

/// Analytic Bloch bands along a momentum path with the square-root branch
/// chosen for continuity against the previous point.
pub fn bloch_bands_continuous(
    params: &ModelParams,
    ks: &[f64],
) -> Result<(Vec<C64>, Vec<C64>)> {
    let mut plus: Vec<C64> = Vec::with_capacity(ks.len());
    let mut minus: Vec<C64> = Vec::with_capacity(ks.len());
    for &k in ks {
        let (mut a, mut b) = bloch_spectrum_analytic(params, k)?;
        if let (Some(&pa), Some(&pb)) = (plus.last(), minus.last()) {
            let keep = (a - pa).norm() + (b - pb).norm();
            let swap = (b - pa).norm() + (a - pb).norm();
            if swap < keep {
                std::mem::swap(&mut a, &mut b);
            }
        }
        plus.push(a);
        minus.push(b);
    }
    Ok((plus, minus))
}

/// Momentum of the slowest-decaying Bloch mode: argmax over a fixed
/// 400-point grid of max(Im h_k^+, Im h_k^-), ties broken toward smaller
/// |k| and then toward positive k.
pub fn kstar(params: &ModelParams) -> Result<f64> {
    let grid = momentum_grid(KSTAR_GRID);
    let mut rates = Vec::with_capacity(grid.len());
    for &k in &grid {
        let (a, b) = bloch_spectrum_analytic(params, k)?;
        rates.push(a.im.max(b.im));
    }
    let best = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut choice: Option<f64> = None;
    for (&k, &r) in grid.iter().zip(&rates) {
        if r < best - 1e-12 {
            continue;
        }
        choice = Some(match choice {
            None => k,
            Some(c) => {
                if k.abs() < c.abs() - 1e-12 || ((k.abs() - c.abs()).abs() < 1e-12 && k > c) {
                    k
                } else {
                    c
                }
            }
        });
    }
    choice.ok_or(Error::Undefined("empty momentum grid"))
}

/// Which spectral feature a critical-pairing scan tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanCriterion {
    /// Smallest pairing where the real-axis gap exceeds `gap_tol`.
    GapOpening,
    /// Smallest pairing where the imaginary bandwidth drops below `bw_tol`.
    BandwidthCollapse,
}

fn criterion_met(summary: &SpectralSummary, criterion: ScanCriterion, tol: &SpectralTolerances) -> bool {
    match criterion {
        ScanCriterion::GapOpening => summary.real_gap > tol.gap_tol,
        ScanCriterion::BandwidthCollapse => summary.imag_bandwidth < tol.bw_tol,
    }
}

/// Scans the open-chain spectrum over an ascending pairing grid and refines
/// the first onset of `criterion` by bisection to 1e-3 w.
///
/// `params_for` maps a pairing amplitude to a full parameter set (so callers
/// control which other couplings co-vary, e.g. Γ_p = 2Δ).
pub fn critical_delta_scan<F>(
    params_for: F,
    deltas: &[f64],
    criterion: ScanCriterion,
) -> Result<f64>
where
    F: Fn(f64) -> ModelParams + Sync,
{
    if deltas.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: deltas.len(),
        });
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "pairing grid must be strictly increasing".into(),
        ));
    }
    let w = params_for(deltas[0]).w;
    let tol = SpectralTolerances::for_hopping(w);
    let met: Vec<bool> = deltas
        .par_iter()
        .map(|&d| {
            obc_spectrum_with(&params_for(d), &tol).map(|s| criterion_met(&s, criterion, &tol))
        })
        .collect::<Result<_>>()?;
    let first = met.iter().position(|&m| m).ok_or(Error::NotBracketed)?;
    if first == 0 {
        return Ok(deltas[0]);
    }
    let (mut lo, mut hi) = (deltas[first - 1], deltas[first]);
    while hi - lo > 1e-3 * w {
        let mid = 0.5 * (lo + hi);
        let s = obc_spectrum_with(&params_for(mid), &tol)?;
        if criterion_met(&s, criterion, &tol) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the pairing amplitude of a spectral exceptional point by
/// minimizing the eigenvalue cluster radius over the bracket spanned by the
/// grid, then certifying the flag (cluster collapse plus eigenvector
/// degeneracy) at the minimizer.
pub fn locate_exceptional_point<F>(params_for: F, deltas: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> ModelParams + Sync,
{
    if deltas.len() < 3 {
        return Err(Error::InsufficientData {
            need: 3,
            got: deltas.len(),
        });
    }
    let w = params_for(deltas[0]).w;
    let tol = SpectralTolerances::for_hopping(w);
    let radius = |d: f64| -> Result<f64> {
        Ok(obc_spectrum_with(&params_for(d), &tol)?.ep_cluster_radius)
    };
    let radii: Vec<f64> = deltas
        .par_iter()
        .map(|&d| radius(d))
        .collect::<Result<_>>()?;
    let arg = radii
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let (mut lo, mut hi) = (
        deltas[arg.saturating_sub(1)],
        deltas[(arg + 1).min(deltas.len() - 1)],
    );
    // Golden-section search on the cluster radius, which dips sharply at the
    // exceptional point.
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let (mut a, mut b) = (lo + phi * (hi - lo), hi - phi * (hi - lo));
    let (mut fa, mut fb) = (radius(a)?, radius(b)?);
    while hi - lo > 1e-4 * w {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = lo + phi * (hi - lo);
            fa = radius(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = hi - phi * (hi - lo);
            fb = radius(b)?;
        }
    }
    let dc = 0.5 * (lo + hi);
    let summary = obc_spectrum_with(&params_for(dc), &tol)?;
    if !summary.ep_flag {
        return Err(Error::NotBracketed);
    }
    Ok(dc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    /// Unordered-pair distance between two eigenvalue pairs.
    fn pair_distance(p: (C64, C64), q: (C64, C64)) -> f64 {
        let keep = (p.0 - q.0).norm().max((p.1 - q.1).norm());
        let swap = (p.0 - q.1).norm().max((p.1 - q.0).norm());
        keep.min(swap)
    }

    #[test]
    fn analytic_trivial_points() {
        // Hopping-only loss at k = pi/2: {0, -4iw}.
        let p = ModelParams::coherent_pairing(0.0, 8, Boundary::Periodic);
        let (a, b) = bloch_spectrum_analytic(&p, PI / 2.0).unwrap();
        let want = (C64::new(0.0, 0.0), C64::new(0.0, -4.0));
        assert!(pair_distance((a, b), want) < 1e-12);

        // Full collapse on the non-reciprocal line at delta = w. The
        // discriminant vanishes identically, so its square root only
        // resolves to sqrt(roundoff) ~ 1e-8.
        let p = ModelParams::nonreciprocal_pairing(1.0, 8, Boundary::Periodic);
        for k in [0.0, 0.3, PI / 2.0, 2.5, PI] {
            let (a, b) = bloch_spectrum_analytic(&p, k).unwrap();
            assert!(close(a, C64::new(0.0, -4.0), 1e-7));
            assert!(close(b, C64::new(0.0, -4.0), 1e-7));
        }

        // Non-reciprocal line at delta = 0.5, k = 0: -3i -/+ 2 sqrt(0.75).
        let p = ModelParams::nonreciprocal_pairing(0.5, 8, Boundary::Periodic);
        let (a, b) = bloch_spectrum_analytic(&p, 0.0).unwrap();
        let r = 2.0 * 0.75_f64.sqrt();
        let want = (C64::new(-r, -3.0), C64::new(r, -3.0));
        assert!(pair_distance((a, b), want) < 1e-12);
    }

    #[test]
    fn analytic_matches_numeric_bloch_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51ec);
        for _ in 0..125 {
            let params = ModelParams {
                w: rng.gen_range(0.2..2.0),
                delta: rng.gen_range(0.0..2.0),
                mu: rng.gen_range(-1.0..1.0),
                gamma_h: rng.gen_range(0.0..3.0),
                theta_h: rng.gen_range(-PI..PI),
                gamma_p: rng.gen_range(0.0..2.0),
                theta_p: rng.gen_range(-PI..PI),
                n_sites: 8,
                boundary: Boundary::Periodic,
            };
            for k in momentum_grid(8) {
                let blocks = lattice::build_bloch(&params, k).unwrap();
                let numeric = crate::linalg::eigvals(&blocks.h_k).unwrap();
                let analytic = bloch_spectrum_analytic(&params, k).unwrap();
                let d = pair_distance(analytic, (numeric[0], numeric[1]));
                assert!(d < 1e-10, "k={k}: distance {d}");
            }
        }
    }

    #[test]
    fn obc_particle_hole_symmetry_at_zero_mu() {
        // A generic mu = 0 parameter set with a diagonalizable dynamical
        // matrix; the fully non-reciprocal lines are defective, so their
        // computed eigenvalues carry pseudospectral noise far above 1e-9.
        let generic = ModelParams {
            w: 1.0,
            delta: 0.6,
            mu: 0.0,
            gamma_h: 1.3,
            theta_h: 0.7,
            gamma_p: 0.5,
            theta_p: 1.9,
            n_sites: 20,
            boundary: Boundary::Open,
        };
        for params in [ModelParams::coherent_pairing(0.7, 20, Boundary::Open), generic] {
            let summary = obc_spectrum(&params).unwrap();
            let mut pool = summary.eigenvalues.clone();
            for e in &summary.eigenvalues {
                let target = C64::new(-e.re, e.im);
                let (idx, dist) = pool
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, (p - target).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(dist < 1e-9, "no -E* partner for {e}");
                pool.swap_remove(idx);
            }
        }
    }

    #[test]
    fn eigenvalues_decay_on_preset_lines() {
        for delta in [0.1, 0.5, 1.0, 3.0] {
            for params in [
                ModelParams::coherent_pairing(delta, 24, Boundary::Open),
                ModelParams::nonreciprocal_pairing(delta, 24, Boundary::Open),
            ] {
                let summary = obc_spectrum(&params).unwrap();
                for e in &summary.eigenvalues {
                    assert!(e.im <= 1e-10, "growing mode {e} at delta={delta}");
                }
            }
        }
    }

    #[test]
    fn circle_law_below_transition() {
        let params = ModelParams::nonreciprocal_pairing(0.4, 64, Boundary::Periodic);
        let center = C64::new(0.0, -2.0 * (1.0 + 0.4));
        let radius = 2.0 * ((1.0 + 0.4) * (1.0 - 0.4_f64)).sqrt();
        for k in momentum_grid(64) {
            let (a, b) = bloch_spectrum_analytic(&params, k).unwrap();
            assert!(((a - center).norm() - radius).abs() < 1e-10);
            assert!(((b - center).norm() - radius).abs() < 1e-10);
        }
    }

    #[test]
    fn obc_exceptional_point_at_delta_w() {
        let params = ModelParams::nonreciprocal_pairing(1.0, 100, Boundary::Open);
        let summary = obc_spectrum(&params).unwrap();
        assert!(summary.ep_flag, "cluster radius {}", summary.ep_cluster_radius);
        let target = C64::new(0.0, -4.0);
        for e in &summary.eigenvalues {
            assert!((e - target).norm() < 1e-6, "eigenvalue {e} away from -4iw");
        }
    }

    #[test]
    fn obc_gap_and_zero_modes_deep_in_paired_phase() {
        let params = ModelParams::coherent_pairing(10.0, 100, Boundary::Open);
        let summary = obc_spectrum(&params).unwrap();
        assert!(
            (summary.real_gap - 2.0).abs() < 0.1,
            "gap {} not within 5% of 2w",
            summary.real_gap
        );
        assert_eq!(summary.zero_mode_count, 2);
        assert!(!summary.ep_flag);
    }

    #[test]
    fn kstar_examples() {
        let p = ModelParams::nonreciprocal_pairing(0.5, 8, Boundary::Periodic);
        assert!((kstar(&p).unwrap() - PI / 2.0).abs() < 1e-9);
        let p = ModelParams::nonreciprocal_pairing(2.0, 8, Boundary::Periodic);
        assert!(kstar(&p).unwrap().abs() < 1e-9);
        let p = ModelParams::coherent_pairing(0.0, 8, Boundary::Periodic);
        assert!((kstar(&p).unwrap() - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn gap_opening_scan_increases_with_size() {
        let grid: Vec<f64> = (1..=15).map(|i| 0.1 * i as f64).collect();
        let scan = |n: usize| {
            critical_delta_scan(
                |d| ModelParams::coherent_pairing(d, n, Boundary::Open),
                &grid,
                ScanCriterion::GapOpening,
            )
            .unwrap()
        };
        let d25 = scan(25);
        let d50 = scan(50);
        assert!(d25 > 0.0 && d25 < 1.0, "d25 = {d25}");
        assert!(d50 > d25, "d50 = {d50} not above d25 = {d25}");
        assert!(d50 < 1.05, "d50 = {d50}");
    }

    #[test]
    fn bandwidth_collapse_scan_triggers() {
        let grid: Vec<f64> = (1..=40).map(|i| 0.5 * i as f64).collect();
        let dc = critical_delta_scan(
            |d| ModelParams::coherent_pairing(d, 25, Boundary::Open),
            &grid,
            ScanCriterion::BandwidthCollapse,
        )
        .unwrap();
        assert!(dc > 1.0 && dc < 20.0, "dc = {dc}");
    }

    #[test]
    fn scan_errors() {
        let grid: Vec<f64> = (1..=5).map(|i| 0.01 * i as f64).collect();
        let err = critical_delta_scan(
            |d| ModelParams::coherent_pairing(d, 25, Boundary::Open),
            &grid,
            ScanCriterion::GapOpening,
        );
        assert!(matches!(err, Err(Error::NotBracketed)));
    }

    #[test]
    fn exceptional_point_location() {
        let grid: Vec<f64> = (1..=15).map(|i| 0.2 * i as f64).collect();
        let dc = locate_exceptional_point(
            |d| ModelParams::nonreciprocal_pairing(d, 25, Boundary::Open),
            &grid,
        )
        .unwrap();
        assert!((dc - 1.0).abs() <= 1e-3, "dc = {dc}");
    }

    #[test]
    fn continuous_bands_have_no_jumps() {
        let params = ModelParams::nonreciprocal_pairing(0.5, 8, Boundary::Periodic);
        let ks: Vec<f64> = (0..=200).map(|i| -PI + 2.0 * PI * i as f64 / 200.0).collect();
        let (plus, minus) = bloch_bands_continuous(&params, &ks).unwrap();
        for w in plus.windows(2).chain(minus.windows(2)) {
            assert!((w[1] - w[0]).norm() < 0.2, "band jump {}", (w[1] - w[0]).norm());
        }
    }

    #[test]
    fn pbc_spectrum_summary() {
        let params = ModelParams::nonreciprocal_pairing(0.4, 32, Boundary::Periodic);
        let summary = pbc_spectrum(&params).unwrap();
        assert_eq!(summary.eigenvalues.len(), 64);
        assert_eq!(summary.kstar, Some(kstar(&params).unwrap()));
        let center = C64::new(0.0, -2.8);
        let radius = 2.0 * (1.4_f64 * 0.6).sqrt();
        for e in &summary.eigenvalues {
            assert!(((e - center).norm() - radius).abs() < 1e-9);
        }
    }
}
