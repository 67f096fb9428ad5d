//! Finite-shot bitstring sampling and the measured defect-density estimator.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

use super::density::DensityMatrix;
use super::statevector::DenseState;

/// Draws `shots` basis-state samples from a probability vector. Strings are
/// '0'/'1' characters, most significant qubit first.
pub fn sample_bitstrings_from_probabilities(
    probabilities: &[f64],
    n_qubits: usize,
    shots: usize,
    rng: &mut SplitMix64,
) -> Vec<String> {
    debug_assert_eq!(probabilities.len(), 1 << n_qubits);
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    (0..shots)
        .map(|_| {
            let u = rng.next_f64() * total;
            let idx = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                Ok(i) => i,
                Err(i) => i.min(cdf.len() - 1),
            };
            index_to_bitstring(idx, n_qubits)
        })
        .collect()
}

fn index_to_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index & (1 << (n_qubits - 1 - q)) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Samples measurement outcomes from a pure state.
pub fn sample_bitstrings_state(state: &DenseState, shots: usize, seed: u64) -> Vec<String> {
    let mut rng = SplitMix64::from_tags(seed, &[]);
    sample_bitstrings_from_probabilities(&state.probabilities(), state.n_qubits(), shots, &mut rng)
}

/// Samples measurement outcomes from a density matrix.
pub fn sample_bitstrings_density(rho: &DensityMatrix, shots: usize, seed: u64) -> Vec<String> {
    let mut rng = SplitMix64::from_tags(seed, &[]);
    sample_bitstrings_from_probabilities(&rho.probabilities(), rho.n_qubits(), shots, &mut rng)
}

/// Estimates the defect density from measured bitstrings: per-string
/// domain-wall fraction, averaged; the error is the sample standard
/// deviation over the square root of the number of shots.
pub fn defect_density_from_bitstrings(samples: &[String]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no bitstrings".into()));
    }
    let l = samples[0].len();
    if l < 2 {
        return Err(Error::MalformedData(format!(
            "bitstrings must have length >= 2, got {l}"
        )));
    }
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for s in samples {
        if s.len() != l {
            return Err(Error::MalformedData(format!(
                "ragged bitstring lengths: {} vs {}",
                s.len(),
                l
            )));
        }
        let bytes = s.as_bytes();
        let mut walls = 0usize;
        for w in bytes.windows(2) {
            match (w[0], w[1]) {
                (b'0' | b'1', b'0' | b'1') => {
                    if w[0] != w[1] {
                        walls += 1;
                    }
                }
                _ => {
                    return Err(Error::MalformedData(format!(
                        "bitstring contains characters other than 0/1: {s:?}"
                    )))
                }
            }
        }
        let d = walls as f64 / (l - 1) as f64;
        sum += d;
        sum2 += d * d;
    }
    let n = samples.len() as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_samples_deterministically() {
        let state = DenseState::basis_state(&[0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        let samples = sample_bitstrings_state(&state, 50, 1);
        assert!(samples.iter().all(|s| s == "00001111"));
        let (d, err) = defect_density_from_bitstrings(&samples).unwrap();
        assert!((d - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn ghz_samples_are_balanced() {
        // GHZ built directly from probabilities.
        let l = 5;
        let mut probs = vec![0.0; 1 << l];
        probs[0] = 0.5;
        probs[(1 << l) - 1] = 0.5;
        let mut rng = SplitMix64::new(2);
        let samples = sample_bitstrings_from_probabilities(&probs, l, 4096, &mut rng);
        let zeros = samples.iter().filter(|s| *s == "00000").count();
        let ones = samples.iter().filter(|s| *s == "11111").count();
        assert_eq!(zeros + ones, 4096);
        assert!((zeros as f64 / 4096.0 - 0.5).abs() < 0.05);
        let (d, _) = defect_density_from_bitstrings(&samples).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn plus_state_estimates_half() {
        let state = DenseState::plus_state(6).unwrap();
        let samples = sample_bitstrings_state(&state, 4096, 3);
        let (d, err) = defect_density_from_bitstrings(&samples).unwrap();
        assert!((d - 0.5).abs() < 4.0 * err, "d = {d}, err = {err}");
    }

    #[test]
    fn alternating_string_has_unit_density() {
        let (d, _) = defect_density_from_bitstrings(&["010101".into()]).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn estimator_rejects_bad_input() {
        assert!(defect_density_from_bitstrings(&[]).is_err());
        assert!(defect_density_from_bitstrings(&["0101".into(), "010".into()]).is_err());
        assert!(defect_density_from_bitstrings(&["01a1".into()]).is_err());
        assert!(defect_density_from_bitstrings(&["0".into()]).is_err());
    }

    #[test]
    fn fixed_seed_reproduces_samples() {
        let state = DenseState::plus_state(4).unwrap();
        let a = sample_bitstrings_state(&state, 100, 9);
        let b = sample_bitstrings_state(&state, 100, 9);
        assert_eq!(a, b);
    }
}
