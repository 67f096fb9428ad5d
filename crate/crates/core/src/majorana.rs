//! Free-fermion engine: evolves a 2L x 2L Majorana covariance matrix.
//!
//! Majorana convention (1-based qubit index i):
//! `a_{2i-1} = (prod_{j<i} X_j) Z_i`, `a_{2i} = (prod_{j<i} X_j) Y_i`,
//! and `M[j,k] = (i/2) <[a_j, a_k]>`. Under this convention
//! `X_i = i a_{2i-1} a_{2i}` and `Z_i Z_{i+1} = i a_{2i} a_{2i+1}`, so
//! `<X_i> = M[2i-1, 2i]` and `<Z_i Z_{i+1}> = M[2i, 2i+1]`.
//!
//! A Trotter step `exp(+i h X_i)` acts on the Majorana pair as a plane
//! rotation by angle `-2h`; bonds are identical on pair `(2i, 2i+1)`. Each
//! sub-layer is a product of commuting plane rotations, so a step costs
//! O(L^2) and is exact to machine precision.

use crate::error::{Error, Result};
use crate::protocol::PerturbedSchedule;

/// Correlator sign calibrated against the L=2, N=1 dense oracle
/// (see `tests/cross_engine.rs`).
pub const ZZ_SIGN: f64 = 1.0;

/// Gaussian fermionic state of an L-qubit chain, stored as the dense
/// row-major 2L x 2L covariance matrix.
#[derive(Debug, Clone)]
pub struct MajoranaCovariance {
    n_qubits: usize,
    /// Row-major (2L)^2 entries.
    m: Vec<f64>,
}

/// Which Trotter sub-layer a rotation layer implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Field,
    Bond,
}

/// A commuting set of plane rotations on disjoint Majorana-mode pairs.
#[derive(Debug, Clone)]
pub struct PlaneRotationLayer {
    pub kind: LayerKind,
    /// `(j, k, angle)` with 0-based mode indices; rotation acts as
    /// `a_j -> cos(angle) a_j + sin(angle) a_k`.
    pub rotations: Vec<(usize, usize, f64)>,
}

impl MajoranaCovariance {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        2 * self.n_qubits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[row * self.dim() + col]
    }

    /// Raw matrix entries, row-major.
    pub fn entries(&self) -> &[f64] {
        &self.m
    }

    /// Max-entry deviation from antisymmetry, `max |M + M^T|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..r {
                worst = worst.max((self.m[r * d + c] + self.m[c * d + r]).abs());
            }
        }
        worst
    }

    /// Max-entry deviation from purity, `max |M M^T - I|`.
    pub fn purity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut dot = 0.0;
                for k in 0..d {
                    dot += self.m[r * d + k] * self.m[c * d + k];
                }
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Dumps the matrix as CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = String::new();
        for r in 0..d {
            let row: Vec<String> = (0..d).map(|c| format!("{}", self.m[r * d + c])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Covariance of the all-plus product state `|+>^L`: 2x2 blocks
/// `[[0, 1], [-1, 0]]` on pairs `(2i, 2i+1)` (0-based), i.e. `<X_i> = 1`.
pub fn initial_covariance(n_qubits: usize) -> Result<MajoranaCovariance> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 qubits, got {n_qubits}"
        )));
    }
    let d = 2 * n_qubits;
    let mut m = vec![0.0; d * d];
    for i in 0..n_qubits {
        m[(2 * i) * d + (2 * i + 1)] = 1.0;
        m[(2 * i + 1) * d + (2 * i)] = -1.0;
    }
    Ok(MajoranaCovariance { n_qubits, m })
}

/// Builds the bond and field rotation layers for one Trotter step.
///
/// The bond layer encodes `exp(+i sum_i J_i Z_i Z_{i+1})` and the field
/// layer `exp(+i sum_i h_i X_i)`; the plane-rotation angle on each pair is
/// `-2x` the coefficient. The bond layer is applied first.
pub fn step_layers(
    field_coeffs: &[f64],
    bond_coeffs: &[f64],
) -> Result<(PlaneRotationLayer, PlaneRotationLayer)> {
    let l = field_coeffs.len();
    if l < 2 || bond_coeffs.len() != l - 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} field coefficients need {} bond coefficients, got {}",
            l,
            l.max(1) - 1,
            bond_coeffs.len()
        )));
    }
    let bond = PlaneRotationLayer {
        kind: LayerKind::Bond,
        rotations: bond_coeffs
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != 0.0)
            .map(|(i, &j)| (2 * i + 1, 2 * i + 2, -2.0 * j))
            .collect(),
    };
    let field = PlaneRotationLayer {
        kind: LayerKind::Field,
        rotations: field_coeffs
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0.0)
            .map(|(i, &h)| (2 * i, 2 * i + 1, -2.0 * h))
            .collect(),
    };
    Ok((bond, field))
}

/// Conjugates the covariance by the layer's orthogonal, `M -> O M O^T`.
pub fn apply_layer(cov: &mut MajoranaCovariance, layer: &PlaneRotationLayer) -> Result<()> {
    let d = cov.dim();
    for &(j, k, angle) in &layer.rotations {
        if j >= d || k >= d {
            return Err(Error::ShapeMismatch(format!(
                "rotation pair ({j}, {k}) out of range for {d} modes"
            )));
        }
        apply_plane_rotation(&mut cov.m, d, j, k, angle);
    }
    Ok(())
}

/// In-place Givens conjugation on rows and columns (j, k).
#[inline]
fn apply_plane_rotation(m: &mut [f64], d: usize, j: usize, k: usize, angle: f64) {
    let (s, c) = angle.sin_cos();
    // Rows: M -> O M.
    let (lo, hi) = if j < k { (j, k) } else { (k, j) };
    let (head, tail) = m.split_at_mut(hi * d);
    let row_j: &mut [f64];
    let row_k: &mut [f64];
    if j < k {
        row_j = &mut head[lo * d..lo * d + d];
        row_k = &mut tail[..d];
    } else {
        row_k = &mut head[lo * d..lo * d + d];
        row_j = &mut tail[..d];
    }
    for (a, b) in row_j.iter_mut().zip(row_k.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x + s * y;
        *b = -s * x + c * y;
    }
    // Columns: M -> M O^T.
    for r in 0..d {
        let x = m[r * d + j];
        let y = m[r * d + k];
        m[r * d + j] = c * x + s * y;
        m[r * d + k] = -s * x + c * y;
    }
}

/// Runs the full perturbed protocol from `|+>^L`, returning the final state.
pub fn run_protocol(perturbed: &PerturbedSchedule) -> Result<MajoranaCovariance> {
    let mut cov = initial_covariance(perturbed.n_qubits)?;
    for step in 0..perturbed.n_steps {
        advance(&mut cov, perturbed.field_row(step), perturbed.bond_row(step))?;
    }
    Ok(cov)
}

/// Runs the protocol, recording the defect density after every step.
pub fn run_protocol_recording(perturbed: &PerturbedSchedule) -> Result<Vec<f64>> {
    let mut cov = initial_covariance(perturbed.n_qubits)?;
    let mut trace = Vec::with_capacity(perturbed.n_steps);
    for step in 0..perturbed.n_steps {
        advance(&mut cov, perturbed.field_row(step), perturbed.bond_row(step))?;
        trace.push(defect_density(&cov));
    }
    Ok(trace)
}

/// One Trotter step: bond layer, then field layer.
pub fn advance(
    cov: &mut MajoranaCovariance,
    field_coeffs: &[f64],
    bond_coeffs: &[f64],
) -> Result<()> {
    if field_coeffs.len() != cov.n_qubits {
        return Err(Error::ShapeMismatch(format!(
            "expected {} field coefficients, got {}",
            cov.n_qubits,
            field_coeffs.len()
        )));
    }
    let (bond, field) = step_layers(field_coeffs, bond_coeffs)?;
    apply_layer(cov, &bond)?;
    apply_layer(cov, &field)?;
    Ok(())
}

/// `<Z_i Z_{i+1}>` for 0-based bond index `i`.
pub fn zz_correlator(cov: &MajoranaCovariance, bond: usize) -> Result<f64> {
    if bond + 1 >= cov.n_qubits {
        return Err(Error::InvalidParameter(format!(
            "bond index {bond} out of range for {} qubits",
            cov.n_qubits
        )));
    }
    Ok(ZZ_SIGN * cov.get(2 * bond + 1, 2 * bond + 2))
}

/// Domain-wall density, `d = (1/(2(L-1))) sum_i (1 - <Z_i Z_{i+1}>)`.
pub fn defect_density(cov: &MajoranaCovariance) -> f64 {
    let bonds = cov.n_qubits - 1;
    let sum: f64 = (0..bonds)
        .map(|i| 1.0 - zz_correlator(cov, i).expect("bond in range"))
        .sum();
    sum / (2.0 * bonds as f64)
}
