//! Real-space and momentum-space matrices of the chain: the 2N x 2N
//! dynamical matrix and noise term, per-momentum 2x2 Bloch blocks, and
//! correlation matrices for the supported initial states.

use crate::model::{
    derive_couplings, momentum_couplings, momentum_grid, negated_index, Boundary, ModelParams,
};
use crate::{C64, Error, Result};
use ndarray::{s, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Block matrix [[G, F], [-F*, -G*]] with G_{lm} = <c+_l c_m> and
/// F_{lm} = <c+_l c+_m>. Complete state description of the Gaussian chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    data: Array2<C64>,
    n_sites: usize,
}

impl CorrelationMatrix {
    /// Assemble from the two independent blocks; the lower blocks are filled
    /// in by the particle-hole redundancy.
    pub fn from_blocks(g: &Array2<C64>, f: &Array2<C64>) -> Self {
        let n = g.nrows();
        assert_eq!(g.dim(), (n, n));
        assert_eq!(f.dim(), (n, n));
        let mut data = Array2::zeros((2 * n, 2 * n));
        data.slice_mut(s![..n, ..n]).assign(g);
        data.slice_mut(s![..n, n..]).assign(f);
        data.slice_mut(s![n.., ..n]).assign(&f.mapv(|z| -z.conj()));
        data.slice_mut(s![n.., n..]).assign(&g.mapv(|z| -z.conj()));
        Self { data, n_sites: n }
    }

    /// Wrap a full 2N x 2N matrix without adjusting the lower blocks.
    pub fn from_data(data: Array2<C64>) -> Self {
        let n = data.nrows() / 2;
        assert_eq!(data.dim(), (2 * n, 2 * n));
        Self { data, n_sites: n }
    }

    pub fn zero(n_sites: usize) -> Self {
        Self {
            data: Array2::zeros((2 * n_sites, 2 * n_sites)),
            n_sites,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn g(&self) -> ArrayView2<'_, C64> {
        self.data.slice(s![..self.n_sites, ..self.n_sites])
    }

    pub fn f(&self) -> ArrayView2<'_, C64> {
        self.data.slice(s![..self.n_sites, self.n_sites..])
    }

    /// Largest violation of the structural invariants: G Hermitian, F
    /// antisymmetric, lower blocks redundant, trace zero.
    pub fn structure_violation(&self) -> f64 {
        let n = self.n_sites;
        let g = self.g();
        let f = self.f();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((g[[i, j]] - g[[j, i]].conj()).norm());
                worst = worst.max((f[[i, j]] + f[[j, i]]).norm());
                worst = worst.max((self.data[[n + i, j]] + f[[i, j]].conj()).norm());
                worst = worst.max((self.data[[n + i, n + j]] + g[[i, j]].conj()).norm());
            }
        }
        let trace: C64 = (0..2 * n).map(|i| self.data[[i, i]]).sum();
        worst.max(trace.norm())
    }

    /// Eigenvalue range of G; physical occupations lie in [0, 1].
    pub fn occupation_bounds(&self) -> Result<(f64, f64)> {
        let vals = crate::linalg::eigvals(&self.g().to_owned())?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in vals {
            lo = lo.min(v.re);
            hi = hi.max(v.re);
        }
        Ok((lo, hi))
    }

    /// Check all invariants within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let v = self.structure_violation();
        if v > tol {
            return Err(Error::PhysicalityViolation {
                what: "correlation-matrix block structure",
                value: v,
            });
        }
        let (lo, hi) = self.occupation_bounds()?;
        if lo < -tol || hi > 1.0 + tol {
            return Err(Error::PhysicalityViolation {
                what: "occupation eigenvalue",
                value: if lo < -tol { lo } else { hi },
            });
        }
        Ok(())
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        crate::linalg::max_abs(&(&self.data - &other.data))
    }
}

/// The non-Hermitian dynamical matrix H and Hermitian noise matrix F driving
/// dC/dt = -i(H C - C H+) + F.
#[derive(Debug, Clone)]
pub struct DynamicalMatrixSet {
    pub h: Array2<C64>,
    pub f: Array2<C64>,
    pub boundary: Boundary,
    pub n_sites: usize,
}

impl DynamicalMatrixSet {
    pub fn noise_is_zero(&self) -> bool {
        self.f.iter().all(|z| z.norm() == 0.0)
    }
}

fn build_real_space(params: &ModelParams, wrap: bool) -> DynamicalMatrixSet {
    let n = params.n_sites;
    let cpl = derive_couplings(params);
    let diag_rate = C64::new(0.0, -params.total_rate());
    let mu = params.mu;

    let mut h = Array2::zeros((2 * n, 2 * n));
    let mut f = Array2::zeros((2 * n, 2 * n));

    for j in 0..n {
        h[[j, j]] = diag_rate + mu;
        h[[n + j, n + j]] = diag_rate - mu;
        f[[j, j]] = C64::new(params.gamma_p, 0.0);
        f[[n + j, n + j]] = C64::new(-params.gamma_p, 0.0);
    }

    // Bond terms; index arithmetic clips at the edges unless wrapped.
    let bonds = if wrap { n } else { n - 1 };
    let i = C64::new(0.0, 1.0);
    let i_dr = i * cpl.delta_r;
    let i_dr_conj = i * cpl.delta_r.conj();
    for j in 0..bonds {
        let jp = (j + 1) % n;
        // Particle rows.
        h[[j, jp]] += cpl.w_r;
        h[[jp, j]] += cpl.w_l;
        h[[j, n + jp]] += -cpl.delta_r.conj();
        h[[jp, n + j]] += cpl.delta_l.conj();
        // Hole rows.
        h[[n + j, n + jp]] += -cpl.w_r.conj();
        h[[n + jp, n + j]] += -cpl.w_l.conj();
        h[[n + j, jp]] += cpl.delta_r;
        h[[n + jp, j]] += -cpl.delta_l;
        // Pairing part of the noise term.
        f[[j, n + jp]] += i_dr_conj;
        f[[jp, n + j]] += -i_dr_conj;
        f[[n + j, jp]] += i_dr;
        f[[n + jp, j]] += -i_dr;
    }

    DynamicalMatrixSet {
        h,
        f,
        boundary: params.boundary,
        n_sites: n,
    }
}

/// Open-boundary dynamical and noise matrices.
pub fn build_obc(params: &ModelParams) -> Result<DynamicalMatrixSet> {
    params.validate()?;
    if params.boundary != Boundary::Open {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Open,
        });
    }
    Ok(build_real_space(params, false))
}

/// Periodic boundaries in real space: the open-chain couplings plus wrap-around
/// bonds between the last and first site.
pub fn build_pbc_wrapped(params: &ModelParams) -> Result<DynamicalMatrixSet> {
    params.validate()?;
    if params.boundary != Boundary::Periodic {
        return Err(Error::BoundaryMismatch {
            expected: Boundary::Periodic,
        });
    }
    Ok(build_real_space(params, true))
}

/// Per-momentum 2x2 Bloch dynamical matrix and momentum-diagonal noise block.
#[derive(Debug, Clone)]
pub struct BlochBlockSet {
    pub k: f64,
    pub h_k: Array2<C64>,
    pub f_k: Array2<C64>,
}

pub fn build_bloch(params: &ModelParams, k: f64) -> Result<BlochBlockSet> {
    params.validate()?;
    let m = momentum_couplings(params, k)?;
    let i = C64::new(0.0, 1.0);
    let gp = C64::new(params.gamma_p, 0.0);
    let minus_k = momentum_couplings(params, -k)?;
    let two_d_sin = 2.0 * params.delta * k.sin();

    let h_k = ndarray::array![
        [
            -(m.xi + i * m.gamma_h_k) - i * gp,
            i * (two_d_sin - m.gamma_p_k).conj()
        ],
        [
            -i * (two_d_sin + m.gamma_p_k),
            (m.xi - i * minus_k.gamma_h_k) - i * gp
        ]
    ];

    // Off-diagonal noise 2 Delta_R^* sin k: the momentum transform of the
    // real-space pairing noise, certified against the microscopic model.
    let cpl = derive_couplings(params);
    let off = 2.0 * cpl.delta_r.conj() * k.sin();
    let f_k = ndarray::array![
        [gp, off],
        [off.conj(), -gp]
    ];
    Ok(BlochBlockSet { k, h_k, f_k })
}

/// Initial states with diagonal occupation and no anomalous correlations.
#[derive(Debug, Clone)]
pub enum InitialState {
    Vacuum,
    /// One fermion on the given site (0-based).
    SingleParticle(usize),
    /// Explicit occupation pattern, one entry per site.
    Product(Vec<bool>),
    /// Bernoulli(1/2) occupations from a seeded generator.
    RandomProduct(u64),
}

impl InitialState {
    pub fn occupations(&self, n_sites: usize) -> Result<Vec<f64>> {
        match self {
            InitialState::Vacuum => Ok(vec![0.0; n_sites]),
            InitialState::SingleParticle(site) => {
                if *site >= n_sites {
                    return Err(Error::SiteOutOfRange {
                        site: *site,
                        n_sites,
                    });
                }
                let mut occ = vec![0.0; n_sites];
                occ[*site] = 1.0;
                Ok(occ)
            }
            InitialState::Product(pattern) => {
                if pattern.len() != n_sites {
                    return Err(Error::InvalidParams(format!(
                        "occupation list has {} entries for {} sites",
                        pattern.len(),
                        n_sites
                    )));
                }
                Ok(pattern.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
            }
            InitialState::RandomProduct(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n_sites)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                    .collect())
            }
        }
    }
}

/// Correlation matrix of a product initial state: diagonal G, F = 0.
pub fn initial_correlation(state: &InitialState, n_sites: usize) -> Result<CorrelationMatrix> {
    let occ = state.occupations(n_sites)?;
    let mut g = Array2::zeros((n_sites, n_sites));
    for (j, &nj) in occ.iter().enumerate() {
        g[[j, j]] = C64::new(nj, 0.0);
    }
    Ok(CorrelationMatrix::from_blocks(&g, &Array2::zeros((n_sites, n_sites))))
}

/// Momentum-space correlation blocks C_{pq}; block (p, q) holds
/// [[G_{pq}, F_{p,-q}], [-F*_{-p,q}, -G*_{-p,-q}]].
///
/// Momenta are indexed by their position in [`momentum_grid`].
#[derive(Debug, Clone)]
pub struct BlockCorrelation {
    n_sites: usize,
    grid: Vec<f64>,
    /// 2N x 2N storage; block (p, q) occupies rows 2p..2p+2, cols 2q..2q+2.
    data: Array2<C64>,
}

impl BlockCorrelation {
    pub fn zero(n_sites: usize) -> Self {
        Self {
            n_sites,
            grid: momentum_grid(n_sites),
            data: Array2::zeros((2 * n_sites, 2 * n_sites)),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn block(&self, p: usize, q: usize) -> ArrayView2<'_, C64> {
        self.data.slice(s![2 * p..2 * p + 2, 2 * q..2 * q + 2])
    }

    pub fn block_owned(&self, p: usize, q: usize) -> Array2<C64> {
        self.block(p, q).to_owned()
    }

    pub fn set_block(&mut self, p: usize, q: usize, b: &Array2<C64>) {
        self.data
            .slice_mut(s![2 * p..2 * p + 2, 2 * q..2 * q + 2])
            .assign(b);
    }

    /// Normal correlator G_{pq}.
    pub fn g_entry(&self, p: usize, q: usize) -> C64 {
        self.data[[2 * p, 2 * q]]
    }

    /// Anomalous correlator <c+_p c+_{-p}> from the diagonal block.
    pub fn anomalous_diag(&self, p: usize) -> C64 {
        self.data[[2 * p, 2 * p + 1]]
    }
}

/// Fourier transform of a product initial state into momentum blocks.
pub fn pbc_block_correlation(state: &InitialState, n_sites: usize) -> Result<BlockCorrelation> {
    let occ = state.occupations(n_sites)?;
    let mut blocks = BlockCorrelation::zero(n_sites);
    let grid = blocks.grid.clone();
    // G_{pq} = (1/N) sum_j e^{i(p-q) j} n_j; F = 0 for product states.
    let mut g = Array2::zeros((n_sites, n_sites));
    for p in 0..n_sites {
        for q in 0..n_sites {
            let mut acc = ZERO;
            for (j, &nj) in occ.iter().enumerate() {
                if nj != 0.0 {
                    acc += C64::from_polar(nj, (grid[p] - grid[q]) * j as f64);
                }
            }
            g[[p, q]] = acc / n_sites as f64;
        }
    }
    for p in 0..n_sites {
        for q in 0..n_sites {
            let np = negated_index(p, n_sites);
            let nq = negated_index(q, n_sites);
            let b = ndarray::array![
                [g[[p, q]], ZERO],
                [ZERO, -g[[np, nq]].conj()]
            ];
            blocks.set_block(p, q, &b);
        }
    }
    Ok(blocks)
}
