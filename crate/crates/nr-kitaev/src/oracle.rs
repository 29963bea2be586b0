//! Brute-force Fock-space reference for small chains.
//!
//! Builds the fermion operators through a Jordan-Wigner encoding, assembles
//! the microscopic Hamiltonian and jump operators, and exposes the full
//! Lindblad superoperator in column-stacked vectorization. Everything here is
//! dense and exponential in the number of sites; it exists purely to certify
//! the correlation-matrix machinery at small sizes.

use crate::lattice::CorrelationMatrix;
use crate::linalg::{conj_transpose, expm, identity, kron, unvec_col, vec_col};
use crate::model::{Boundary, ModelParams};
use crate::{C64, Error, Result};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hard cap on the Liouvillian construction (dimension 4^N).
pub const MAX_ORACLE_SITES: usize = 6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Jordan-Wigner annihilation operators on the 2^N-dimensional Fock space.
///
/// Basis index bit convention: bit (N-1-j) of the basis index is the
/// occupation of site j, i.e. site 0 is the leftmost tensor factor.
pub struct FockSpace {
    pub n_sites: usize,
    pub dim: usize,
    ops: Vec<Array2<C64>>,
}

impl FockSpace {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites > MAX_ORACLE_SITES {
            return Err(Error::SizeGuard {
                n: n_sites,
                max: MAX_ORACLE_SITES,
            });
        }
        let z = ndarray::array![[ONE, ZERO], [ZERO, -ONE]];
        let sm = ndarray::array![[ZERO, ONE], [ZERO, ZERO]];
        let id = identity(2);
        let ops = (0..n_sites)
            .map(|j| {
                let mut op = Array2::from_elem((1, 1), ONE);
                for l in 0..n_sites {
                    let factor = if l < j { &z } else if l == j { &sm } else { &id };
                    op = kron(&op, factor);
                }
                op
            })
            .collect();
        Ok(Self {
            n_sites,
            dim: 1 << n_sites,
            ops,
        })
    }

    pub fn annihilate(&self, j: usize) -> &Array2<C64> {
        &self.ops[j]
    }

    pub fn create(&self, j: usize) -> Array2<C64> {
        conj_transpose(&self.ops[j])
    }

    pub fn number(&self, j: usize) -> Array2<C64> {
        self.create(j).dot(&self.ops[j])
    }

    /// Density matrix of a product state with the given occupations (0 or 1).
    pub fn product_density(&self, occupations: &[f64]) -> Result<Array2<C64>> {
        if occupations.len() != self.n_sites {
            return Err(Error::InvalidParams(format!(
                "{} occupations for {} sites",
                occupations.len(),
                self.n_sites
            )));
        }
        let mut index = 0usize;
        for (j, &n) in occupations.iter().enumerate() {
            if n != 0.0 && n != 1.0 {
                return Err(Error::InvalidParams(
                    "product density needs integer occupations".into(),
                ));
            }
            if n == 1.0 {
                index |= 1 << (self.n_sites - 1 - j);
            }
        }
        let mut rho = Array2::zeros((self.dim, self.dim));
        rho[[index, index]] = ONE;
        Ok(rho)
    }

    /// Random full-rank density matrix (A A+ normalized), seeded.
    pub fn random_density(&self, seed: u64) -> Array2<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((self.dim, self.dim), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let rho = a.dot(&conj_transpose(&a));
        let tr: C64 = (0..self.dim).map(|i| rho[[i, i]]).sum();
        rho / tr
    }
}

/// Microscopic Kitaev Hamiltonian on the Fock space.
pub fn hamiltonian(fock: &FockSpace, params: &ModelParams) -> Array2<C64> {
    let n = fock.n_sites;
    let mut h = Array2::zeros((fock.dim, fock.dim));
    let w = C64::new(params.w, 0.0);
    let delta = C64::new(params.delta, 0.0);
    let bonds = match params.boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    for j in 0..bonds {
        let jp = (j + 1) % n;
        let cdj = fock.create(j);
        let cdjp = fock.create(jp);
        let cj = fock.annihilate(j);
        let cjp = fock.annihilate(jp);
        // -w (c+_j c_{j+1} + h.c.) + Delta c+_j c+_{j+1} + Delta* c_{j+1} c_j
        h = h - (cdj.dot(cjp) + cdjp.dot(cj)).mapv(|z| z * w)
            + cdj.dot(&cdjp).mapv(|z| z * delta)
            + cjp.dot(cj).mapv(|z| z * delta.conj());
    }
    for j in 0..n {
        h = h - fock.number(j).mapv(|z| z * params.mu);
    }
    h
}

/// Engineered jump operators. For open boundaries the bulk bond operators are
/// kept with out-of-chain sites dropped, which makes the single-particle loss
/// and gain rates uniform along the chain.
pub fn jump_operators(fock: &FockSpace, params: &ModelParams) -> Vec<Array2<C64>> {
    let n = fock.n_sites;
    let sqrt_gh = params.gamma_h.sqrt();
    let sqrt_gp = params.gamma_p.sqrt();
    let ph_h = C64::from_polar(1.0, params.theta_h);
    let ph_p = C64::from_polar(1.0, params.theta_p);
    let mut jumps = Vec::new();

    match params.boundary {
        Boundary::Periodic => {
            for j in 0..n {
                let jp = (j + 1) % n;
                if sqrt_gh > 0.0 {
                    let l = (fock.annihilate(j) + &fock.annihilate(jp).mapv(|z| z * ph_h))
                        .mapv(|z| z * sqrt_gh);
                    jumps.push(l);
                }
                if sqrt_gp > 0.0 {
                    let l = (fock.annihilate(j) + &fock.create(jp).mapv(|z| z * ph_p))
                        .mapv(|z| z * sqrt_gp);
                    jumps.push(l);
                }
            }
        }
        Boundary::Open => {
            for j in 0..n - 1 {
                if sqrt_gh > 0.0 {
                    let l = (fock.annihilate(j) + &fock.annihilate(j + 1).mapv(|z| z * ph_h))
                        .mapv(|z| z * sqrt_gh);
                    jumps.push(l);
                }
                if sqrt_gp > 0.0 {
                    let l = (fock.annihilate(j) + &fock.create(j + 1).mapv(|z| z * ph_p))
                        .mapv(|z| z * sqrt_gp);
                    jumps.push(l);
                }
            }
            // Truncated boundary bonds: the half of the bond operator that
            // lies inside the chain.
            if sqrt_gh > 0.0 {
                jumps.push(fock.annihilate(0).mapv(|z| z * (sqrt_gh * ph_h)));
                jumps.push(fock.annihilate(n - 1).mapv(|z| z * sqrt_gh));
            }
            if sqrt_gp > 0.0 {
                jumps.push(fock.create(0).mapv(|z| z * (sqrt_gp * ph_p)));
                jumps.push(fock.annihilate(n - 1).mapv(|z| z * sqrt_gp));
            }
        }
    }
    jumps
}

/// Full Lindblad superoperator in column-stacked vectorization:
/// vec(d rho/dt) = L vec(rho).
pub fn build_liouvillian(h: &Array2<C64>, jumps: &[Array2<C64>]) -> Array2<C64> {
    let d = h.nrows();
    let id = identity(d);
    let i = C64::new(0.0, 1.0);
    // -i (I (x) H - H^T (x) I)
    let mut l = (kron(&id, h) - kron(&h.t().to_owned(), &id)).mapv(|z| -i * z);
    for jump in jumps {
        let jconj = jump.mapv(|z| z.conj());
        let jdj = conj_transpose(jump).dot(jump);
        l = l + kron(&jconj, jump)
            - (kron(&id, &jdj) + kron(&jdj.t().to_owned(), &id)).mapv(|z| 0.5 * z);
    }
    l
}

/// Convenience: Liouvillian straight from the model parameters.
pub fn liouvillian_for(fock: &FockSpace, params: &ModelParams) -> Array2<C64> {
    let h = hamiltonian(fock, params);
    let jumps = jump_operators(fock, params);
    build_liouvillian(&h, &jumps)
}

/// Evolve a density matrix for time t under the full Lindbladian.
pub fn evolve_exact(rho0: &Array2<C64>, liouvillian: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
    let propagator = expm(&liouvillian.mapv(|z| z * t))?;
    let v = propagator.dot(&vec_col(rho0));
    Ok(unvec_col(&v, rho0.nrows(), rho0.nrows()))
}

/// Correlation matrix of an exact density matrix: G_{lm} = tr(rho c+_l c_m),
/// F_{lm} = tr(rho c+_l c+_m).
pub fn correlations_exact(fock: &FockSpace, rho: &Array2<C64>) -> CorrelationMatrix {
    let n = fock.n_sites;
    let trace_with = |op: &Array2<C64>| -> C64 {
        let prod = rho.dot(op);
        (0..fock.dim).map(|i| prod[[i, i]]).sum()
    };
    let mut g = Array2::zeros((n, n));
    let mut f = Array2::zeros((n, n));
    for l in 0..n {
        let cdl = fock.create(l);
        for m in 0..n {
            g[[l, m]] = trace_with(&cdl.dot(fock.annihilate(m)));
            f[[l, m]] = trace_with(&cdl.dot(&fock.create(m)));
        }
    }
    CorrelationMatrix::from_blocks(&g, &f)
}

/// Steady state from the Liouvillian kernel. Returns the trace-normalized
/// Hermitized null vector and whether the null space looked degenerate.
pub fn steady_state_exact(liouvillian: &Array2<C64>) -> Result<(Array2<C64>, bool)> {
    let (vals, vecs) = crate::linalg::eig(liouvillian)?;
    let scale = vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
    let tol = 1e-10 * scale;
    let mut null: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].norm() < tol).collect();
    if null.is_empty() {
        // Fall back to the slowest eigenvalue.
        let best = (0..vals.len())
            .min_by(|&a, &b| vals[a].norm().partial_cmp(&vals[b].norm()).unwrap())
            .unwrap();
        null.push(best);
    }
    let degenerate = null.len() > 1;
    let d = (liouvillian.nrows() as f64).sqrt() as usize;
    let v: Array1<C64> = vecs.column(null[0]).to_owned();
    let m = unvec_col(&v, d, d);
    let herm = (&m + &conj_transpose(&m)).mapv(|z| 0.5 * z);
    let tr: C64 = (0..d).map(|i| herm[[i, i]]).sum();
    if tr.norm() < 1e-12 {
        return Err(Error::SingularDynamics);
    }
    Ok((herm.mapv(|z| z / tr), degenerate))
}
