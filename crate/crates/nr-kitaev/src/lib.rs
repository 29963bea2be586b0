//! Simulator for a dissipative Kitaev chain with engineered non-reciprocal
//! hopping and pairing.
//!
//! The state of the open chain is a 2N x 2N correlation matrix evolving under
//! a non-Hermitian dynamical matrix plus a constant noise term. This crate
//! builds those matrices for open and periodic boundaries, propagates them,
//! solves for steady states through a dense Sylvester equation, extracts the
//! spectral and real-space diagnostics of the pairing-induced transition, and
//! certifies everything at small sizes against a brute-force Lindblad
//! integrator on the full Fock space.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `nrk` binary for config-driven parameter sweeps.

pub mod evolution;
pub mod experiments;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod spectral;

pub use evolution::{
    geometric_times, propagate, propagate_pbc_blocks, state_at, steady_state, steady_state_pbc,
    superoperator_spectrum, vectorized_superoperator, SuperoperatorSpectrum, TrajectoryRecord,
};
pub use lattice::{
    build_bloch, build_obc, build_pbc_wrapped, initial_correlation, pbc_block_correlation,
    BlochBlockSet, BlockCorrelation, CorrelationMatrix, DynamicalMatrixSet, InitialState,
};
pub use model::{
    derive_couplings, momentum_couplings, momentum_grid, Boundary, DerivedCouplings,
    ModelParams, MomentumCouplings,
};
pub use observables::{
    central_correlations, currents, density, fit_lengthscales, fit_power_law,
    lightcone_asymmetry, momentum_occupation, pbc_density, relaxation_time, CurrentReport,
    DensityProfile, FitQuality, LengthscaleFits, RelaxationResult,
};
pub use spectral::{
    bloch_bands_continuous, bloch_spectrum_analytic, critical_delta_scan, kstar,
    locate_exceptional_point, obc_spectrum, obc_spectrum_with, pbc_spectrum, ScanCriterion,
    SpectralSummary, SpectralTolerances,
};

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A superoperator rate is numerically zero, so the steady state is not unique.
    #[error("singular dynamics: a superoperator rate is numerically zero")]
    SingularDynamics,
    #[error("system size {n} exceeds the dense-construction guard {max}")]
    SizeGuard { n: usize, max: usize },
    #[error("operation requires {expected:?} boundary conditions")]
    BoundaryMismatch { expected: model::Boundary },
    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("scan criterion never triggered on the supplied grid")]
    NotBracketed,
    #[error("relaxation threshold not reached within the trajectory horizon")]
    NotConverged,
    #[error("unphysical {what}: {value}")]
    PhysicalityViolation { what: &'static str, value: f64 },
    #[error("need at least {need} data points, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("quantity undefined: {0}")]
    Undefined(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
