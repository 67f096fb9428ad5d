//! Run configuration: one TOML file with nested sections, plus command-line
//! overrides. Flags always win over the file.

use std::path::{Path, PathBuf};

use kzsim_core::analysis::curve::Engine;
use kzsim_core::analysis::fits::FitWindow;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub run: Run,
    pub grid: Grid,
    pub fit: Fit,
    pub dense: Dense,
    pub ingest: Ingest,
    pub predict: Predict,
    pub walk: Walk,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Run {
    /// Chain lengths to sweep.
    pub l: Vec<usize>,
    pub sigma_noise: Vec<f64>,
    pub sigma_disorder: Vec<f64>,
    pub n_realizations: usize,
    /// Bitstrings sampled per point; 0 means exact expectation values.
    pub shots: usize,
    pub seed: u64,
    pub engine: Engine,
    /// Output directory; each invocation writes into its own directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for Run {
    fn default() -> Self {
        Run {
            l: vec![20],
            sigma_noise: vec![0.0],
            sigma_disorder: vec![0.0],
            n_realizations: 10,
            shots: 0,
            seed: 1,
            engine: Engine::Majorana,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    /// Explicit N grid; when empty, a geometric grid from the range below.
    pub n: Vec<usize>,
    pub n_min: usize,
    pub n_max: usize,
    pub points_per_decade: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: Vec::new(),
            n_min: 10,
            n_max: 1000,
            points_per_decade: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fit {
    /// Inclusive fit window in N; 0 means unbounded on that side.
    pub n_min: usize,
    pub n_max: usize,
    /// Ansatz prefactors used by ingest-fit; unit coefficients by default.
    pub a_noise: f64,
    pub a_disorder: f64,
}

impl Default for Fit {
    fn default() -> Self {
        Fit {
            n_min: 0,
            n_max: 0,
            a_noise: 1.0,
            a_disorder: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Dense {
    /// Two-qubit gate fidelity for the stochastic Pauli model.
    pub fidelity: f64,
    pub t1: f64,
    pub t2: f64,
    pub dt_one_qubit: f64,
    pub dt_two_qubit: f64,
    /// Also emit the noiseless free-fermion curve on the same grid.
    pub gaussian: bool,
}

impl Default for Dense {
    fn default() -> Self {
        Dense {
            fidelity: 0.99,
            t1: 30.1e-6,
            t2: 14.5e-6,
            dt_one_qubit: 32e-9,
            dt_two_qubit: 176e-9,
            gaussian: true,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ingest {
    /// Directory holding one bitstring file per (L, N), named L{L}_N{N}.txt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Predict {
    pub a_ideal: f64,
    pub a_noise: f64,
    pub sigma: Vec<f64>,
}

impl Default for Predict {
    fn default() -> Self {
        Predict {
            a_ideal: 0.323,
            a_noise: 2.42,
            sigma: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Walk {
    pub n: Vec<usize>,
    pub sigma: Vec<f64>,
    pub realizations: usize,
}

impl Default for Walk {
    fn default() -> Self {
        Walk {
            n: vec![10, 100, 1000],
            sigma: vec![0.01, 0.05],
            realizations: 10_000,
        }
    }
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub engine: Option<Engine>,
    pub shots: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> CliResult<Config> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Config::default(),
        };
        if let Some(seed) = overrides.seed {
            cfg.run.seed = seed;
        }
        if let Some(out) = &overrides.out {
            cfg.run.out = Some(out.clone());
        }
        if let Some(engine) = overrides.engine {
            cfg.run.engine = engine;
        }
        if let Some(shots) = overrides.shots {
            cfg.run.shots = shots;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        if self.run.l.is_empty() {
            return Err(CliError::Config("run.l must list at least one length".into()));
        }
        if self.run.l.iter().any(|&l| l < 2) {
            return Err(CliError::Config("chain lengths must be >= 2".into()));
        }
        if self.run.n_realizations == 0 {
            return Err(CliError::Config("run.n_realizations must be >= 1".into()));
        }
        if self
            .run
            .sigma_noise
            .iter()
            .chain(&self.run.sigma_disorder)
            .any(|&s| !s.is_finite() || s < 0.0)
        {
            return Err(CliError::Config("sigma values must be finite and >= 0".into()));
        }
        if self.grid.n.is_empty() {
            if self.grid.n_min < 1 || self.grid.n_max < self.grid.n_min {
                return Err(CliError::Config(format!(
                    "empty N range: n_min = {}, n_max = {}",
                    self.grid.n_min, self.grid.n_max
                )));
            }
            if self.grid.points_per_decade == 0 {
                return Err(CliError::Config("grid.points_per_decade must be >= 1".into()));
            }
        }
        if self.fit.n_max != 0 && self.fit.n_max < self.fit.n_min {
            return Err(CliError::Config("empty fit window".into()));
        }
        if self.fit.a_noise <= 0.0 || self.fit.a_disorder <= 0.0 {
            return Err(CliError::Config("fit ansatz prefactors must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.dense.fidelity) {
            return Err(CliError::Config("dense.fidelity must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// The N grid for engine sweeps: explicit list if given, else geometric.
    pub fn n_grid(&self) -> Vec<usize> {
        if self.grid.n.is_empty() {
            kzsim_core::sweep::log_n_grid(
                self.grid.n_min,
                self.grid.n_max,
                self.grid.points_per_decade,
            )
        } else {
            let mut grid = self.grid.n.clone();
            grid.sort_unstable();
            grid.dedup();
            grid
        }
    }

    /// Fit window from the config, with the given default when unset.
    pub fn fit_window(&self, default: FitWindow) -> FitWindow {
        if self.fit.n_min == 0 && self.fit.n_max == 0 {
            default
        } else {
            FitWindow::new(
                self.fit.n_min,
                if self.fit.n_max == 0 { usize::MAX } else { self.fit.n_max },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[run]\nseed = 3\nshots = 16\n").unwrap();
        let ov = Overrides {
            seed: Some(99),
            shots: None,
            ..Default::default()
        };
        let cfg = Config::load(Some(&path), &ov).unwrap();
        assert_eq!(cfg.run.seed, 99);
        assert_eq!(cfg.run.shots, 16);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[run]\nbogus = 1\n").unwrap();
        let err = Config::load(Some(&path), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn empty_n_range_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[grid]\nn_min = 100\nn_max = 10\n").unwrap();
        let err = Config::load(Some(&path), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn explicit_grid_sorted_and_deduped() {
        let mut cfg = Config::default();
        cfg.grid.n = vec![8, 2, 8, 4];
        assert_eq!(cfg.n_grid(), vec![2, 4, 8]);
    }
}
