//! Grid sweeps: computes defect curves over (N, sigma) grids, averaging
//! over randomness realizations.
//!
//! Every (point, realization) pair gets its own seed derived from the
//! master seed and the point coordinates, so any grid cell can be
//! recomputed in isolation and parallel execution is order-independent.
//! Averages are accumulated in realization-index order to keep outputs
//! byte-identical between serial and parallel runs.

use rayon::prelude::*;

use crate::analysis::curve::{CurveMeta, CurvePoint, DefectCurve, Engine};
use crate::dense::statevector::{apply_circuit_statevector, DenseState};
use crate::error::{Error, Result};
use crate::majorana;
use crate::protocol::{build_schedule, perturb_schedule, sample_randomness, RandomnessConfig};
use crate::rng::derive_key;

/// Seed for one (L, N, sigma_noise, sigma_disorder, realization) cell.
pub fn realization_seed(
    master_seed: u64,
    l: usize,
    n: usize,
    sigma_noise: f64,
    sigma_disorder: f64,
    realization: usize,
) -> u64 {
    derive_key(
        master_seed,
        &[
            l as u64,
            n as u64,
            sigma_noise.to_bits(),
            sigma_disorder.to_bits(),
            realization as u64,
        ],
    )
}

/// One protocol run: final defect density for a single realization.
pub fn simulate_defect(
    engine: Engine,
    l: usize,
    n: usize,
    sigma_noise: f64,
    sigma_disorder: f64,
    master_seed: u64,
    realization: usize,
) -> Result<f64> {
    if n == 0 {
        // The Hadamard layer alone: |+>^L, one defect every two bonds.
        return Ok(0.5);
    }
    let schedule = build_schedule(n)?;
    let config = RandomnessConfig {
        sigma_noise,
        sigma_disorder,
        seed: realization_seed(master_seed, l, n, sigma_noise, sigma_disorder, realization),
        realization_index: 0,
    };
    let realization = sample_randomness(&config, l, n)?;
    let perturbed = perturb_schedule(&schedule, &realization)?;
    match engine {
        Engine::Majorana => Ok(majorana::defect_density(&majorana::run_protocol(&perturbed)?)),
        Engine::Statevector => {
            let mut state = DenseState::plus_state(l)?;
            apply_circuit_statevector(&mut state, &perturbed)?;
            Ok(state.defect_density())
        }
        other => Err(Error::InvalidParameter(format!(
            "sweep engine must be majorana or statevector, got {other:?}"
        ))),
    }
}

/// Parameters of one defect-curve computation.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub engine: Engine,
    pub l: usize,
    pub n_grid: Vec<usize>,
    pub sigma_noise: f64,
    pub sigma_disorder: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Computes a defect curve over the N grid, realization-parallel.
pub fn defect_curve(spec: &CurveSpec) -> Result<DefectCurve> {
    if spec.n_grid.is_empty() {
        return Err(Error::InvalidParameter("empty N grid".into()));
    }
    if spec.n_realizations == 0 {
        return Err(Error::InvalidParameter("n_realizations must be >= 1".into()));
    }
    let mut sorted = spec.n_grid.clone();
    sorted.sort_unstable();
    sorted.dedup();

    let cells: Vec<(usize, usize)> = sorted
        .iter()
        .flat_map(|&n| (0..spec.n_realizations).map(move |r| (n, r)))
        .collect();
    let values: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(n, r)| {
            simulate_defect(
                spec.engine,
                spec.l,
                n,
                spec.sigma_noise,
                spec.sigma_disorder,
                spec.seed,
                r,
            )
        })
        .collect();

    let mut points = Vec::with_capacity(sorted.len());
    for (i, &n) in sorted.iter().enumerate() {
        let slice = &values[i * spec.n_realizations..(i + 1) * spec.n_realizations];
        let mut ds = Vec::with_capacity(slice.len());
        for v in slice {
            match v {
                Ok(d) => ds.push(*d),
                Err(e) => return Err(Error::InvalidParameter(e.to_string())),
            }
        }
        let count = ds.len() as f64;
        let mean = ds.iter().sum::<f64>() / count;
        let var = ds.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / count;
        let err = if ds.len() > 1 { (var / count).sqrt() } else { 0.0 };
        points.push(CurvePoint {
            n,
            d: mean,
            err,
            n_realizations: spec.n_realizations,
        });
    }
    let curve = DefectCurve {
        points,
        meta: CurveMeta {
            l: spec.l,
            sigma_noise: spec.sigma_noise,
            sigma_disorder: spec.sigma_disorder,
            engine: spec.engine,
            seed: spec.seed,
        },
    };
    curve.validate()?;
    Ok(curve)
}

/// Geometric N grid from `n_min` to `n_max` with roughly `points_per_decade`
/// points per decade, always including both endpoints.
pub fn log_n_grid(n_min: usize, n_max: usize, points_per_decade: usize) -> Vec<usize> {
    assert!(n_min >= 1 && n_max >= n_min && points_per_decade >= 1);
    let ratio = 10f64.powf(1.0 / points_per_decade as f64);
    let mut grid = Vec::new();
    let mut x = n_min as f64;
    while x < n_max as f64 {
        grid.push(x.round() as usize);
        x *= ratio;
    }
    grid.push(n_max);
    grid.sort_unstable();
    grid.dedup();
    grid
}
