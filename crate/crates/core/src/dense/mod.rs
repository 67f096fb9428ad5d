//! Exact small-chain reference engines: state-vector evolution (the oracle
//! for the free-fermion engine), density-matrix evolution with stochastic
//! Pauli and T1-T2 Kraus channels, Pauli trajectory sampling, and
//! finite-shot bitstring generation.

pub mod density;
pub mod noisy;
pub mod sampling;
pub mod statevector;

pub use density::{DampingParams, DensityMatrix, PauliChannelRates};
pub use noisy::{run_noisy_circuit, run_pauli_trajectories, trajectory_mean_defect, NoiseModel};
pub use sampling::defect_density_from_bitstrings;
pub use statevector::DenseState;
