//! Density-matrix backend with stochastic Pauli and T1-T2 Kraus channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DENSITY_QUBITS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pauli matrices indexed 0..=3 as I, X, Y, Z.
pub fn pauli_matrix(index: u8) -> [[Complex64; 2]; 2] {
    let i = Complex64::new(0.0, 1.0);
    match index {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -i], [i, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index must be 0..=3"),
    }
}

/// Two-qubit Pauli error rates `p_{mu nu}`, mu/nu over (I, X, Y, Z),
/// row-major: `rates[4 * mu + nu]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliChannelRates {
    pub rates: [f64; 16],
}

impl PauliChannelRates {
    pub fn new(rates: [f64; 16]) -> Result<Self> {
        if rates.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidParameter("negative Pauli rate".into()));
        }
        let sum: f64 = rates.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Pauli rates must sum to 1, got {sum}"
            )));
        }
        Ok(Self { rates })
    }

    /// Identity channel (`p_II = 1`).
    pub fn identity() -> Self {
        let mut rates = [0.0; 16];
        rates[0] = 1.0;
        Self { rates }
    }

    /// `p_II = fidelity`, remainder spread uniformly over the 15 error
    /// terms (depolarizing-style default when measured rates are absent).
    pub fn uniform_with_fidelity(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::InvalidParameter("fidelity must be in [0, 1]".into()));
        }
        let mut rates = [(1.0 - fidelity) / 15.0; 16];
        rates[0] = fidelity;
        Self::new(rates)
    }

    pub fn fidelity(&self) -> f64 {
        self.rates[0]
    }
}

/// Relaxation/dephasing times and cycle durations (all in seconds).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampingParams {
    /// Per-qubit relaxation times.
    pub t1: Vec<f64>,
    /// Per-qubit dephasing times.
    pub t2: Vec<f64>,
    /// Duration of a one-qubit gate cycle.
    pub dt_one_qubit: f64,
    /// Duration of each of the two two-qubit gate cycles.
    pub dt_two_qubit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    OneQubit,
    TwoQubit,
}

impl DampingParams {
    /// Uniform times across `n_qubits` qubits.
    pub fn uniform(n_qubits: usize, t1: f64, t2: f64, dt_one_qubit: f64, dt_two_qubit: f64) -> Result<Self> {
        let p = Self {
            t1: vec![t1; n_qubits],
            t2: vec![t2; n_qubits],
            dt_one_qubit,
            dt_two_qubit,
        };
        p.validate()?;
        Ok(p)
    }

    /// Aspen-11 averages: T1 = 30.1 us, T2 = 14.5 us, 32 ns one-qubit
    /// cycles, 176 ns two-qubit cycles.
    pub fn aspen_defaults(n_qubits: usize) -> Self {
        Self::uniform(n_qubits, 30.1e-6, 14.5e-6, 32e-9, 176e-9).expect("valid defaults")
    }

    pub fn validate(&self) -> Result<()> {
        if self.t1.len() != self.t2.len() {
            return Err(Error::ShapeMismatch("T1/T2 length mismatch".into()));
        }
        let ok = self.t1.iter().chain(&self.t2).all(|&t| t > 0.0)
            && self.dt_one_qubit > 0.0
            && self.dt_two_qubit > 0.0;
        if !ok {
            return Err(Error::InvalidParameter("times must be positive".into()));
        }
        Ok(())
    }

    /// Per-qubit `(gamma, lambda)` for a cycle: `gamma = 1 - exp(-dt/T1)`,
    /// `lambda = 1 - exp(-dt/T2)`.
    pub fn gamma_lambda(&self, cycle: CycleKind) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let dt = match cycle {
            CycleKind::OneQubit => self.dt_one_qubit,
            CycleKind::TwoQubit => self.dt_two_qubit,
        };
        Ok(self
            .t1
            .iter()
            .zip(&self.t2)
            .map(|(&t1, &t2)| (1.0 - (-dt / t1).exp(), 1.0 - (-dt / t2).exp()))
            .collect())
    }
}

/// Kraus operators of the combined amplitude (T1) and phase (T2) damping
/// channel for given `gamma`, `lambda`.
pub fn t1t2_kraus(gamma: f64, lambda: f64) -> Result<[[[Complex64; 2]; 2]; 3]> {
    if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(
            "gamma and lambda must be in [0, 1]".into(),
        ));
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let k1 = [
        [ONE, ZERO],
        [ZERO, re((1.0 - gamma - (1.0 - gamma) * lambda).sqrt())],
    ];
    let k2 = [[ZERO, re(gamma.sqrt())], [ZERO, ZERO]];
    let k3 = [[ZERO, ZERO], [ZERO, re(((1.0 - gamma) * lambda).sqrt())]];
    Ok([k1, k2, k3])
}

/// Dense density matrix, row-major `2^L x 2^L`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|+><+|^L`, the state after the Hadamard layer.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let val = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            n_qubits,
            rho: vec![val; dim * dim],
        })
    }

    /// Maximally mixed state `I / 2^L`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut rho = vec![ZERO; dim * dim];
        for r in 0..dim {
            rho[r * dim + r] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits, rho })
    }

    /// Pure-state projector from a state vector.
    pub fn from_statevector(state: &super::DenseState) -> Result<Self> {
        Self::check_size(state.n_qubits())?;
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut rho = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                rho[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(Self {
            n_qubits: state.n_qubits(),
            rho,
        })
    }

    fn check_size(n_qubits: usize) -> Result<()> {
        if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::SizeOverflow(format!(
                "density matrix supports 1..={MAX_DENSITY_QUBITS} qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|r| self.rho[r * dim + r]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..=r {
                let diff = self.rho[r * dim + c] - self.rho[c * dim + r].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, via Jacobi rotations on the real symmetric
    /// embedding `[[Re, -Im], [Im, Re]]`. Diagnostic, O(dim^3) per sweep.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let n = 2 * dim;
        let mut a = vec![0.0f64; n * n];
        for r in 0..dim {
            for c in 0..dim {
                let v = self.rho[r * dim + c];
                a[r * n + c] = v.re;
                a[(r + dim) * n + c + dim] = v.re;
                a[r * n + c + dim] = -v.im;
                a[(r + dim) * n + c] = v.im;
            }
        }
        for _sweep in 0..40 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|k| a[k * n + k]).fold(f64::INFINITY, f64::min)
    }

    #[inline]
    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// `rho -> U rho U^dag` for a diagonal bond rotation
    /// `U = exp(+i J Z_i Z_{i+1})`.
    pub fn apply_zz_rotation(&mut self, bond: usize, j: f64) {
        let dim = self.dim();
        let m1 = self.bit_mask(bond);
        let m2 = self.bit_mask(bond + 1);
        let phase = |idx: usize| -> Complex64 {
            let same = (idx & m1 != 0) == (idx & m2 != 0);
            Complex64::from_polar(1.0, if same { j } else { -j })
        };
        let phases: Vec<Complex64> = (0..dim).map(phase).collect();
        for r in 0..dim {
            for c in 0..dim {
                self.rho[r * dim + c] *= phases[r] * phases[c].conj();
            }
        }
    }

    /// `rho -> A rho A^dag` for an arbitrary single-qubit operator `A`
    /// (not necessarily unitary).
    pub fn apply_one_qubit_conjugation(&mut self, qubit: usize, a: &[[Complex64; 2]; 2]) {
        let dim = self.dim();
        let mask = self.bit_mask(qubit);
        // Rows: rho -> (A (x) I) rho.
        for c in 0..dim {
            for r in 0..dim {
                if r & mask == 0 {
                    let x0 = self.rho[r * dim + c];
                    let x1 = self.rho[(r | mask) * dim + c];
                    self.rho[r * dim + c] = a[0][0] * x0 + a[0][1] * x1;
                    self.rho[(r | mask) * dim + c] = a[1][0] * x0 + a[1][1] * x1;
                }
            }
        }
        // Columns: rho -> rho (A (x) I)^dag.
        for r in 0..dim {
            for c in 0..dim {
                if c & mask == 0 {
                    let x0 = self.rho[r * dim + c];
                    let x1 = self.rho[r * dim + (c | mask)];
                    self.rho[r * dim + c] = x0 * a[0][0].conj() + x1 * a[0][1].conj();
                    self.rho[r * dim + (c | mask)] = x0 * a[1][0].conj() + x1 * a[1][1].conj();
                }
            }
        }
    }

    /// Field rotation `exp(+i h X_i)`.
    pub fn apply_x_rotation(&mut self, qubit: usize, h: f64) {
        let c = Complex64::new(h.cos(), 0.0);
        let is = Complex64::new(0.0, h.sin());
        self.apply_one_qubit_conjugation(qubit, &[[c, is], [is, c]]);
    }

    /// Two-qubit stochastic Pauli channel on qubits `(i, j)`.
    pub fn apply_pauli_channel(
        &mut self,
        pair: (usize, usize),
        rates: &PauliChannelRates,
    ) -> Result<()> {
        if pair.0 == pair.1 || pair.0 >= self.n_qubits || pair.1 >= self.n_qubits {
            return Err(Error::InvalidParameter(format!(
                "invalid qubit pair ({}, {})",
                pair.0, pair.1
            )));
        }
        let mut out = vec![ZERO; self.rho.len()];
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                let p = rates.rates[(4 * mu + nu) as usize];
                if p == 0.0 {
                    continue;
                }
                let mut term = self.clone();
                if mu != 0 {
                    term.apply_one_qubit_conjugation(pair.0, &pauli_matrix(mu));
                }
                if nu != 0 {
                    term.apply_one_qubit_conjugation(pair.1, &pauli_matrix(nu));
                }
                for (o, t) in out.iter_mut().zip(&term.rho) {
                    *o += p * t;
                }
            }
        }
        self.rho = out;
        Ok(())
    }

    /// Combined T1-T2 channel on one qubit.
    pub fn apply_t1t2_channel(&mut self, qubit: usize, gamma: f64, lambda: f64) -> Result<()> {
        let kraus = t1t2_kraus(gamma, lambda)?;
        let mut out = vec![ZERO; self.rho.len()];
        for k in &kraus {
            let mut term = self.clone();
            term.apply_one_qubit_conjugation(qubit, k);
            for (o, t) in out.iter_mut().zip(&term.rho) {
                *o += t;
            }
        }
        self.rho = out;
        Ok(())
    }

    /// `<Z_i Z_{i+1}>` for 0-based bond `i`.
    pub fn zz_expectation(&self, bond: usize) -> f64 {
        let dim = self.dim();
        let m1 = self.bit_mask(bond);
        let m2 = self.bit_mask(bond + 1);
        (0..dim)
            .map(|r| {
                let sign = if (r & m1 != 0) == (r & m2 != 0) { 1.0 } else { -1.0 };
                sign * self.rho[r * dim + r].re
            })
            .sum()
    }

    pub fn defect_density(&self) -> f64 {
        let bonds = self.n_qubits - 1;
        let sum: f64 = (0..bonds).map(|i| 1.0 - self.zz_expectation(i)).sum();
        sum / (2.0 * bonds as f64)
    }

    /// Computational-basis probabilities (the diagonal).
    pub fn probabilities(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|r| self.rho[r * dim + r].re.max(0.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_rho(l: usize, seed: u64) -> DensityMatrix {
        // Random mixture of a few random product evolutions of |+><+|.
        let mut rng = SplitMix64::new(seed);
        let mut rho = DensityMatrix::plus_state(l).unwrap();
        for q in 0..l {
            rho.apply_x_rotation(q, rng.next_normal());
        }
        for b in 0..l - 1 {
            rho.apply_zz_rotation(b, rng.next_normal());
        }
        let mixed = DensityMatrix::maximally_mixed(l).unwrap();
        let w = rng.next_f64() * 0.5;
        for (a, b) in rho.rho.iter_mut().zip(&mixed.rho) {
            *a = (1.0 - w) * *a + w * b;
        }
        rho
    }

    #[test]
    fn identity_pauli_channel_is_noop() {
        let mut rho = random_rho(3, 1);
        let before = rho.entries().to_vec();
        rho.apply_pauli_channel((0, 1), &PauliChannelRates::identity()).unwrap();
        for (a, b) in rho.entries().iter().zip(&before) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zz_pauli_channel_scales_coherence() {
        // On |++>, a p_zz channel scales <X_0> by (1 - 2p). Oracle: direct
        // 4x4 algebra, rho' = (1-p) rho + p ZZ rho ZZ.
        let p = 0.12;
        let mut rates = [0.0; 16];
        rates[0] = 1.0 - p;
        rates[15] = p;
        let rates = PauliChannelRates::new(rates).unwrap();
        let mut rho = DensityMatrix::plus_state(2).unwrap();
        rho.apply_pauli_channel((0, 1), &rates).unwrap();
        let dim = 4;
        // Brute-force oracle.
        let plus = DensityMatrix::plus_state(2).unwrap();
        let sign = |idx: usize| if (idx & 2 != 0) == (idx & 1 != 0) { 1.0 } else { -1.0 };
        for r in 0..dim {
            for c in 0..dim {
                let expected =
                    (1.0 - p) * plus.rho[r * dim + c] + p * sign(r) * sign(c) * plus.rho[r * dim + c];
                assert!((rho.rho[r * dim + c] - expected).norm() < 1e-14);
            }
        }
        // <X_0> = tr(rho X_0): sum of off-diagonals in the qubit-0 block.
        let x0: f64 = (0..dim)
            .map(|r| rho.rho[r * dim + (r ^ 2)].re)
            .sum();
        assert!((x0 - (1.0 - 2.0 * p)).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_pauli_fixed_point() {
        let mut rng = SplitMix64::new(9);
        let mut raw = [0.0f64; 16];
        let mut sum = 0.0;
        for r in raw.iter_mut() {
            *r = rng.next_f64();
            sum += *r;
        }
        for r in raw.iter_mut() {
            *r /= sum;
        }
        let rates = PauliChannelRates::new(raw).unwrap();
        let mut rho = DensityMatrix::maximally_mixed(3).unwrap();
        let before = rho.entries().to_vec();
        rho.apply_pauli_channel((0, 2), &rates).unwrap();
        for (a, b) in rho.entries().iter().zip(&before) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_rates_validation() {
        assert!(PauliChannelRates::new([1.0 / 16.0; 16]).is_ok());
        let mut bad = [0.0; 16];
        bad[0] = 1.1;
        assert!(PauliChannelRates::new(bad).is_err());
        bad[0] = 1.5;
        bad[1] = -0.5;
        assert!(PauliChannelRates::new(bad).is_err());
    }

    #[test]
    fn kraus_completeness() {
        for &(g, l) in &[(0.0, 0.0), (0.3, 0.1), (1.0, 0.7), (0.5, 1.0)] {
            let kraus = t1t2_kraus(g, l).unwrap();
            // sum K^dag K = I
            for r in 0..2 {
                for c in 0..2 {
                    let mut acc = ZERO;
                    for k in &kraus {
                        for m in 0..2 {
                            acc += k[m][r].conj() * k[m][c];
                        }
                    }
                    let target = if r == c { ONE } else { ZERO };
                    assert!((acc - target).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn t1t2_zero_is_noop() {
        let mut rho = random_rho(2, 3);
        let before = rho.entries().to_vec();
        rho.apply_t1t2_channel(1, 0.0, 0.0).unwrap();
        for (a, b) in rho.entries().iter().zip(&before) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn full_decay_maps_one_to_zero() {
        let mut rho =
            DensityMatrix::from_statevector(&super::super::DenseState::basis_state(&[1]).unwrap())
                .unwrap();
        rho.apply_t1t2_channel(0, 1.0, 0.0).unwrap();
        assert!((rho.rho[0].re - 1.0).abs() < 1e-14);
        assert!(rho.rho[3].norm() < 1e-14);
    }

    #[test]
    fn channels_preserve_trace_and_hermiticity() {
        let mut rng = SplitMix64::new(17);
        let mut rho = random_rho(3, 21);
        for step in 0..20 {
            if step % 2 == 0 {
                let g = rng.next_f64();
                let l = rng.next_f64();
                rho.apply_t1t2_channel(step % 3, g, l).unwrap();
            } else {
                let rates = PauliChannelRates::uniform_with_fidelity(rng.next_f64()).unwrap();
                rho.apply_pauli_channel((step % 3, (step + 1) % 3), &rates).unwrap();
            }
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(rho.trace().im.abs() < 1e-12);
            assert!(rho.hermiticity_defect() < 1e-12);
        }
        assert!(rho.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn gamma_lambda_from_times() {
        let p = DampingParams::uniform(2, 30.1e-6, 14.5e-6, 32e-9, 176e-9).unwrap();
        let gl = p.gamma_lambda(CycleKind::TwoQubit).unwrap();
        let expected_gamma = 1.0 - (-0.176f64 / 30.1).exp();
        assert!((gl[0].0 - expected_gamma).abs() < 1e-12);
        assert!((expected_gamma - 5.83e-3).abs() < 2e-5);
        let gl1 = p.gamma_lambda(CycleKind::OneQubit).unwrap();
        let expected_lambda = 1.0 - (-0.032f64 / 14.5).exp();
        assert!((gl1[0].1 - expected_lambda).abs() < 1e-12);
    }

    #[test]
    fn damping_rejects_nonpositive_times() {
        assert!(DampingParams::uniform(2, 0.0, 1e-6, 1e-9, 1e-9).is_err());
        assert!(DampingParams::uniform(2, 1e-6, 1e-6, -1e-9, 1e-9).is_err());
    }

    #[test]
    fn t1t2_out_of_range_rejected() {
        let mut rho = DensityMatrix::plus_state(2).unwrap();
        assert!(rho.apply_t1t2_channel(0, 1.2, 0.0).is_err());
        assert!(rho.apply_t1t2_channel(0, 0.0, -0.1).is_err());
    }

    #[test]
    fn statevector_and_density_agree_on_circuit() {
        use crate::dense::statevector::{apply_circuit_statevector, DenseState};
        use crate::protocol::{build_schedule, PerturbedSchedule};
        let l = 4;
        let schedule = build_schedule(7).unwrap();
        let p = PerturbedSchedule::ideal(&schedule, l).unwrap();
        let mut state = DenseState::plus_state(l).unwrap();
        apply_circuit_statevector(&mut state, &p).unwrap();
        let mut rho = DensityMatrix::plus_state(l).unwrap();
        for step in 0..p.n_steps {
            for (bond, &j) in p.bond_row(step).iter().enumerate() {
                rho.apply_zz_rotation(bond, j);
            }
            for (qubit, &h) in p.field_row(step).iter().enumerate() {
                rho.apply_x_rotation(qubit, h);
            }
        }
        for bond in 0..l - 1 {
            assert!((state.zz_expectation(bond) - rho.zz_expectation(bond)).abs() < 1e-12);
        }
    }
}
