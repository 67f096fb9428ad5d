//! Desk-scale study of the noise-depth tradeoff in Trotterized adiabatic
//! circuits on the 1D quantum Ising chain.
//!
//! The crate has four layers:
//!
//! - [`protocol`]: the adiabatic schedule and its Gaussian noise/disorder
//!   perturbations.
//! - [`majorana`]: the free-fermion engine (2L x 2L covariance matrix),
//!   exact at hundreds of qubits and thousands of steps.
//! - [`dense`]: exact small-chain engines — the state-vector oracle, the
//!   density-matrix backend with stochastic Pauli and T1-T2 channels,
//!   trajectory sampling, and finite-shot bitstrings.
//! - [`analysis`]: defect curves and the scaling-law fits (ideal power
//!   law, noise and disorder laws, optimal depth, effective noise
//!   strength extraction).
//!
//! [`sweep`] drives realization-averaged grid scans with deterministic
//! per-cell seeding.

pub mod analysis;
pub mod dense;
pub mod error;
pub mod majorana;
pub mod protocol;
pub mod rng;
pub mod sweep;

pub use analysis::{CurveMeta, CurvePoint, DefectCurve, Engine, FitResult, FitWindow};
pub use error::{Error, Result};
pub use protocol::{
    build_schedule, perturb_schedule, sample_randomness, PerturbedSchedule, RandomnessConfig,
    RandomnessRealization, Schedule,
};
