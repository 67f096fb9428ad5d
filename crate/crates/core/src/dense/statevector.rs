//! Pure-state simulation of the Trotterized protocol.
//!
//! Qubit 1 is the most significant bit of the basis-state index; 0-based
//! qubit `i` therefore occupies bit `L - 1 - i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocol::PerturbedSchedule;

pub const MAX_STATEVECTOR_QUBITS: usize = 24;

#[derive(Debug, Clone)]
pub struct DenseState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    /// The all-plus state `|+>^L`, i.e. the protocol input after the
    /// Hadamard layer.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    /// Computational basis state from bits, most significant qubit first.
    pub fn basis_state(bits: &[u8]) -> Result<Self> {
        Self::check_size(bits.len())?;
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
            }
            index = (index << 1) | b as usize;
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << bits.len()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits: bits.len(),
            amplitudes,
        })
    }

    fn check_size(n_qubits: usize) -> Result<()> {
        if n_qubits == 0 || n_qubits > MAX_STATEVECTOR_QUBITS {
            return Err(Error::SizeOverflow(format!(
                "state vector supports 1..={MAX_STATEVECTOR_QUBITS} qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    #[inline]
    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// Applies `exp(+i h X_i)` to 0-based qubit `i`.
    pub fn apply_x_rotation(&mut self, qubit: usize, h: f64) {
        let mask = self.bit_mask(qubit);
        let c = Complex64::new(h.cos(), 0.0);
        let is = Complex64::new(0.0, h.sin());
        for idx in 0..self.amplitudes.len() {
            if idx & mask == 0 {
                let a0 = self.amplitudes[idx];
                let a1 = self.amplitudes[idx | mask];
                self.amplitudes[idx] = c * a0 + is * a1;
                self.amplitudes[idx | mask] = is * a0 + c * a1;
            }
        }
    }

    /// Applies `exp(+i J Z_i Z_{i+1})` to 0-based bond `i`.
    pub fn apply_zz_rotation(&mut self, bond: usize, j: f64) {
        let m1 = self.bit_mask(bond);
        let m2 = self.bit_mask(bond + 1);
        let aligned = Complex64::from_polar(1.0, j);
        let opposed = Complex64::from_polar(1.0, -j);
        for (idx, amp) in self.amplitudes.iter_mut().enumerate() {
            let same = (idx & m1 != 0) == (idx & m2 != 0);
            *amp *= if same { aligned } else { opposed };
        }
    }

    /// Applies a single Pauli operator (1 = X, 2 = Y, 3 = Z) to a qubit.
    pub fn apply_pauli(&mut self, qubit: usize, pauli: u8) {
        let mask = self.bit_mask(qubit);
        match pauli {
            0 => {}
            1 => {
                for idx in 0..self.amplitudes.len() {
                    if idx & mask == 0 {
                        self.amplitudes.swap(idx, idx | mask);
                    }
                }
            }
            2 => {
                let i = Complex64::new(0.0, 1.0);
                for idx in 0..self.amplitudes.len() {
                    if idx & mask == 0 {
                        let a0 = self.amplitudes[idx];
                        let a1 = self.amplitudes[idx | mask];
                        self.amplitudes[idx] = -i * a1;
                        self.amplitudes[idx | mask] = i * a0;
                    }
                }
            }
            3 => {
                for (idx, amp) in self.amplitudes.iter_mut().enumerate() {
                    if idx & mask != 0 {
                        *amp = -*amp;
                    }
                }
            }
            _ => panic!("pauli index must be 0..=3"),
        }
    }

    /// `<Z_i Z_{i+1}>` for 0-based bond `i`.
    pub fn zz_expectation(&self, bond: usize) -> f64 {
        let m1 = self.bit_mask(bond);
        let m2 = self.bit_mask(bond + 1);
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(idx, amp)| {
                let sign = if (idx & m1 != 0) == (idx & m2 != 0) { 1.0 } else { -1.0 };
                sign * amp.norm_sqr()
            })
            .sum()
    }

    /// `<Z_i>` for 0-based qubit `i`.
    pub fn z_expectation(&self, qubit: usize) -> f64 {
        let mask = self.bit_mask(qubit);
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(idx, amp)| {
                let sign = if idx & mask == 0 { 1.0 } else { -1.0 };
                sign * amp.norm_sqr()
            })
            .sum()
    }

    /// Defect density from exact bond correlators.
    pub fn defect_density(&self) -> f64 {
        let bonds = self.n_qubits - 1;
        let sum: f64 = (0..bonds).map(|i| 1.0 - self.zz_expectation(i)).sum();
        sum / (2.0 * bonds as f64)
    }

    /// Computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Runs the full perturbed protocol on `|+>^L`: for each step, the bond
/// layer `exp(+i sum J_i Z_i Z_{i+1})` then the field layer
/// `exp(+i sum h_i X_i)`.
pub fn apply_circuit_statevector(
    state: &mut DenseState,
    perturbed: &PerturbedSchedule,
) -> Result<()> {
    if state.n_qubits != perturbed.n_qubits {
        return Err(Error::ShapeMismatch(format!(
            "state has {} qubits, schedule has {}",
            state.n_qubits, perturbed.n_qubits
        )));
    }
    for step in 0..perturbed.n_steps {
        for (bond, &j) in perturbed.bond_row(step).iter().enumerate() {
            state.apply_zz_rotation(bond, j);
        }
        for (qubit, &h) in perturbed.field_row(step).iter().enumerate() {
            state.apply_x_rotation(qubit, h);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{build_schedule, PerturbedSchedule};

    #[test]
    fn basis_state_defects() {
        let s = DenseState::basis_state(&[0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        assert!((s.defect_density() - 1.0 / 7.0).abs() < 1e-15);
        let s = DenseState::basis_state(&[0, 1, 0, 1]).unwrap();
        assert!((s.defect_density() - 1.0).abs() < 1e-15);
        let s = DenseState::basis_state(&[0; 5]).unwrap();
        assert!(s.defect_density().abs() < 1e-15);
    }

    #[test]
    fn plus_state_has_half_defect_density() {
        let s = DenseState::plus_state(6).unwrap();
        assert!((s.defect_density() - 0.5).abs() < 1e-14);
        for bond in 0..5 {
            assert!(s.zz_expectation(bond).abs() < 1e-14);
        }
    }

    #[test]
    fn long_protocol_approaches_ghz() {
        let l = 6;
        let schedule = build_schedule(300).unwrap();
        let p = PerturbedSchedule::ideal(&schedule, l).unwrap();
        let mut state = DenseState::plus_state(l).unwrap();
        apply_circuit_statevector(&mut state, &p).unwrap();
        assert!(state.defect_density() < 1e-3);
        // GHZ weight concentrates on |0...0> and |1...1>.
        let probs = state.probabilities();
        assert!(probs[0] + probs[probs.len() - 1] > 0.99);
        assert!((probs[0] - probs[probs.len() - 1]).abs() < 0.02);
    }

    #[test]
    fn circuit_preserves_norm() {
        let l = 5;
        let schedule = build_schedule(40).unwrap();
        let config = crate::protocol::RandomnessConfig {
            sigma_noise: 0.2,
            sigma_disorder: 0.1,
            seed: 4,
            realization_index: 2,
        };
        let r = crate::protocol::sample_randomness(&config, l, 40).unwrap();
        let p = crate::protocol::perturb_schedule(&schedule, &r).unwrap();
        let mut state = DenseState::plus_state(l).unwrap();
        apply_circuit_statevector(&mut state, &p).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_flips_basis_state() {
        let mut s = DenseState::basis_state(&[0, 0]).unwrap();
        s.apply_pauli(1, 1);
        assert!((s.amplitudes()[0b01].norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_z_phases_excited_component() {
        let mut s = DenseState::plus_state(1).unwrap();
        s.apply_pauli(0, 3);
        assert!((s.z_expectation(0)).abs() < 1e-14);
        s.apply_pauli(0, 1); // X|-> = -|->
        assert!((s.amplitudes()[0] + s.amplitudes()[1]).norm() < 1e-14);
    }

    #[test]
    fn size_cap_enforced() {
        assert!(DenseState::plus_state(MAX_STATEVECTOR_QUBITS + 1).is_err());
    }
}
