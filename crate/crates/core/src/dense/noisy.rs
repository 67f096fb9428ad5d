//! Noisy circuit execution: cycle compilation, density-matrix evolution
//! with channels, and stochastic Pauli trajectories.
//!
//! Each Trotter step compiles into three cycles: two-qubit ZZ rotations on
//! even bonds, then on odd bonds, then single-qubit X rotations. The Pauli
//! model inserts a two-qubit channel after each ZZ gate; the T1-T2 model
//! applies a per-qubit damping channel to every qubit after every cycle,
//! with a cycle-kind-specific duration.

use crate::error::{Error, Result};
use crate::protocol::PerturbedSchedule;
use crate::rng::SplitMix64;

use super::density::{CycleKind, DampingParams, DensityMatrix, PauliChannelRates};
use super::statevector::DenseState;

#[derive(Debug, Clone)]
pub enum NoiseModel {
    Pauli(PauliChannelRates),
    T1T2(DampingParams),
}

/// Evolves `|+><+|^L` through the perturbed schedule under the given noise
/// model, returning the final density matrix.
pub fn run_noisy_circuit(
    perturbed: &PerturbedSchedule,
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::plus_state(perturbed.n_qubits)?;
    if let NoiseModel::T1T2(params) = model {
        if params.t1.len() != perturbed.n_qubits {
            return Err(Error::ShapeMismatch(format!(
                "damping params for {} qubits, circuit has {}",
                params.t1.len(),
                perturbed.n_qubits
            )));
        }
    }
    for step in 0..perturbed.n_steps {
        apply_noisy_step(
            &mut rho,
            perturbed.field_row(step),
            perturbed.bond_row(step),
            model,
        )?;
    }
    Ok(rho)
}

/// Runs the noisy circuit, recording the defect density after every step
/// (index 0 is the N=0 Hadamard-layer point, d = 1/2).
pub fn run_noisy_circuit_recording(
    perturbed: &PerturbedSchedule,
    model: &NoiseModel,
) -> Result<Vec<f64>> {
    let mut rho = DensityMatrix::plus_state(perturbed.n_qubits)?;
    let mut trace = vec![rho.defect_density()];
    for step in 0..perturbed.n_steps {
        apply_noisy_step(
            &mut rho,
            perturbed.field_row(step),
            perturbed.bond_row(step),
            model,
        )?;
        trace.push(rho.defect_density());
    }
    Ok(trace)
}

fn apply_noisy_step(
    rho: &mut DensityMatrix,
    field: &[f64],
    bonds: &[f64],
    model: &NoiseModel,
) -> Result<()> {
    let l = field.len();
    let t1t2_after_cycle = |rho: &mut DensityMatrix, kind: CycleKind| -> Result<()> {
        if let NoiseModel::T1T2(params) = model {
            for (qubit, (gamma, lambda)) in params.gamma_lambda(kind)?.into_iter().enumerate() {
                rho.apply_t1t2_channel(qubit, gamma, lambda)?;
            }
        }
        Ok(())
    };
    // Two two-qubit cycles: even bonds, then odd bonds.
    for parity in 0..2 {
        for bond in (parity..l - 1).step_by(2) {
            rho.apply_zz_rotation(bond, bonds[bond]);
            if let NoiseModel::Pauli(rates) = model {
                rho.apply_pauli_channel((bond, bond + 1), rates)?;
            }
        }
        t1t2_after_cycle(rho, CycleKind::TwoQubit)?;
    }
    // One-qubit cycle.
    for (qubit, &h) in field.iter().enumerate() {
        rho.apply_x_rotation(qubit, h);
    }
    t1t2_after_cycle(rho, CycleKind::OneQubit)?;
    Ok(())
}

/// One stochastic-Pauli trajectory: pure-state evolution where after each
/// ZZ gate a Pauli pair is sampled from the rates and applied.
fn run_single_trajectory(
    perturbed: &PerturbedSchedule,
    rates: &PauliChannelRates,
    rng: &mut SplitMix64,
) -> Result<DenseState> {
    let l = perturbed.n_qubits;
    let mut state = DenseState::plus_state(l)?;
    let sample_pauli = |rng: &mut SplitMix64| -> (u8, u8) {
        let u = rng.next_f64();
        let mut acc = 0.0;
        for idx in 0..16 {
            acc += rates.rates[idx];
            if u <= acc {
                return ((idx / 4) as u8, (idx % 4) as u8);
            }
        }
        (3, 3)
    };
    for step in 0..perturbed.n_steps {
        let bonds = perturbed.bond_row(step);
        for parity in 0..2 {
            for bond in (parity..l - 1).step_by(2) {
                state.apply_zz_rotation(bond, bonds[bond]);
                let (mu, nu) = sample_pauli(rng);
                state.apply_pauli(bond, mu);
                state.apply_pauli(bond + 1, nu);
            }
        }
        for (qubit, &h) in perturbed.field_row(step).iter().enumerate() {
            state.apply_x_rotation(qubit, h);
        }
    }
    Ok(state)
}

/// Samples bitstrings from stochastic Pauli trajectories:
/// `n_trajectories` independent pure-state runs, `shots_per_trajectory`
/// measurement samples each. Trajectory `k` uses a seed stream derived from
/// `(seed, k)`, so trajectories can run in parallel.
pub fn run_pauli_trajectories(
    perturbed: &PerturbedSchedule,
    rates: &PauliChannelRates,
    n_trajectories: usize,
    shots_per_trajectory: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let mut samples = Vec::with_capacity(n_trajectories * shots_per_trajectory);
    for k in 0..n_trajectories {
        let mut rng = SplitMix64::from_tags(seed, &[k as u64, 0]);
        let state = run_single_trajectory(perturbed, rates, &mut rng)?;
        let mut shot_rng = SplitMix64::from_tags(seed, &[k as u64, 1]);
        samples.extend(super::sampling::sample_bitstrings_from_probabilities(
            &state.probabilities(),
            perturbed.n_qubits,
            shots_per_trajectory,
            &mut shot_rng,
        ));
    }
    Ok(samples)
}

/// Trajectory-averaged defect density with its Monte-Carlo standard error,
/// using exact per-trajectory correlators (no shot noise).
pub fn trajectory_mean_defect(
    perturbed: &PerturbedSchedule,
    rates: &PauliChannelRates,
    n_trajectories: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for k in 0..n_trajectories {
        let mut rng = SplitMix64::from_tags(seed, &[k as u64, 0]);
        let state = run_single_trajectory(perturbed, rates, &mut rng)?;
        let d = state.defect_density();
        sum += d;
        sum2 += d * d;
    }
    let n = n_trajectories as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::statevector::apply_circuit_statevector;
    use crate::protocol::{build_schedule, PerturbedSchedule};

    fn ideal(l: usize, n: usize) -> PerturbedSchedule {
        PerturbedSchedule::ideal(&build_schedule(n).unwrap(), l).unwrap()
    }

    #[test]
    fn noiseless_channels_match_pure_circuit() {
        let p = ideal(4, 5);
        let pauli = run_noisy_circuit(&p, &NoiseModel::Pauli(PauliChannelRates::identity())).unwrap();
        // gamma = lambda = 0 via infinite times is not representable;
        // use huge T1/T2 so the channel is numerically the identity.
        let damping = DampingParams::uniform(4, 1e6, 1e6, 1e-9, 1e-9).unwrap();
        let t1t2 = run_noisy_circuit(&p, &NoiseModel::T1T2(damping)).unwrap();
        let mut state = crate::dense::DenseState::plus_state(4).unwrap();
        apply_circuit_statevector(&mut state, &p).unwrap();
        for bond in 0..3 {
            let exact = state.zz_expectation(bond);
            assert!((pauli.zz_expectation(bond) - exact).abs() < 1e-12);
            assert!((t1t2.zz_expectation(bond) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn pauli_model_saturates_near_half() {
        let p = ideal(4, 60);
        let rates = PauliChannelRates::uniform_with_fidelity(0.95).unwrap();
        let rho = run_noisy_circuit(&p, &NoiseModel::Pauli(rates)).unwrap();
        let d = rho.defect_density();
        assert!((d - 0.5).abs() < 0.05, "d = {d}");
    }

    #[test]
    fn t1t2_saturates_below_pauli() {
        let l = 4;
        let p = ideal(l, 60);
        let rates = PauliChannelRates::uniform_with_fidelity(0.95).unwrap();
        let d_pauli = run_noisy_circuit(&p, &NoiseModel::Pauli(rates))
            .unwrap()
            .defect_density();
        // Strong damping to expose the |0>-bias within few steps.
        let damping = DampingParams::uniform(l, 3e-6, 2e-6, 32e-9, 176e-9).unwrap();
        let d_t1t2 = run_noisy_circuit(&p, &NoiseModel::T1T2(damping))
            .unwrap()
            .defect_density();
        assert!(d_t1t2 < d_pauli, "t1t2 {d_t1t2} !< pauli {d_pauli}");
    }

    #[test]
    fn identity_trajectories_are_noiseless() {
        let p = ideal(3, 4);
        let (mean, err) =
            trajectory_mean_defect(&p, &PauliChannelRates::identity(), 10, 5).unwrap();
        let mut state = crate::dense::DenseState::plus_state(3).unwrap();
        apply_circuit_statevector(&mut state, &p).unwrap();
        assert!((mean - state.defect_density()).abs() < 1e-12);
        assert!(err < 1e-12);
    }

    #[test]
    fn trajectories_are_seed_deterministic() {
        let p = ideal(3, 4);
        let rates = PauliChannelRates::uniform_with_fidelity(0.9).unwrap();
        let a = run_pauli_trajectories(&p, &rates, 20, 2, 123).unwrap();
        let b = run_pauli_trajectories(&p, &rates, 20, 2, 123).unwrap();
        assert_eq!(a, b);
        let c = run_pauli_trajectories(&p, &rates, 20, 2, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trajectories_converge_to_density_matrix() {
        let p = ideal(3, 3);
        let rates = PauliChannelRates::uniform_with_fidelity(0.9).unwrap();
        let exact = run_noisy_circuit(&p, &NoiseModel::Pauli(rates.clone()))
            .unwrap()
            .defect_density();
        let (mean, err) = trajectory_mean_defect(&p, &rates, 4000, 7).unwrap();
        assert!(
            (mean - exact).abs() < 4.0 * err.max(1e-4),
            "mean {mean}, exact {exact}, err {err}"
        );
    }
}
