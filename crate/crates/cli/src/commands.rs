//! One function per subcommand. Each takes a resolved [`Config`] and an
//! [`OutputDir`] and returns data errors only; config validation happens
//! before the output directory is created.

use std::collections::BTreeMap;
use std::path::Path;

use kzsim_core::analysis::curve::{CurveMeta, CurvePoint, Engine};
use kzsim_core::analysis::fits::{
    extract_sigma, find_n_opt, fit_disorder_law, fit_kz, fit_noise_law, predict_n_opt,
    random_walk_monte_carlo, random_walk_prediction, FitWindow, SigmaReport,
};
use kzsim_core::analysis::wls::fit_line;
use kzsim_core::dense::density::{DampingParams, PauliChannelRates};
use kzsim_core::dense::noisy::{run_noisy_circuit, NoiseModel};
use kzsim_core::dense::sampling::{defect_density_from_bitstrings, sample_bitstrings_density};
use kzsim_core::rng::derive_key;
use kzsim_core::sweep::{defect_curve, CurveSpec};
use kzsim_core::{build_schedule, DefectCurve, PerturbedSchedule};
use serde::Serialize;

use crate::config::Config;
use crate::error::{data_err, CliError, CliResult};
use crate::output::{sigma_label, OutputDir};

fn engine_curve(cfg: &Config, l: usize, sn: f64, sd: f64, grid: &[usize]) -> CliResult<DefectCurve> {
    let n_realizations = if sn == 0.0 && sd == 0.0 { 1 } else { cfg.run.n_realizations };
    defect_curve(&CurveSpec {
        engine: cfg.run.engine,
        l,
        n_grid: grid.to_vec(),
        sigma_noise: sn,
        sigma_disorder: sd,
        n_realizations,
        seed: cfg.run.seed,
    })
    .map_err(data_err)
}

/// Noiseless sweeps over L with a power-law fit per curve.
pub fn kz_scan(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    if cfg.run.sigma_noise.iter().chain(&cfg.run.sigma_disorder).any(|&s| s != 0.0) {
        return Err(CliError::Config(
            "kz-scan is noiseless; set sigma_noise and sigma_disorder to zero".into(),
        ));
    }
    let grid = cfg.n_grid();
    let window = cfg.fit_window(FitWindow::new(50, usize::MAX));
    let mut fits = BTreeMap::new();
    for &l in &cfg.run.l {
        let curve = engine_curve(cfg, l, 0.0, 0.0, &grid)?;
        out.write_curve(&curve, &format!("kz_L{l}"))?;
        let fit = fit_kz(&curve, window).map_err(data_err)?;
        let a = fit.coefficient("a_free").map(|c| c.value).unwrap_or(f64::NAN);
        let alpha = fit.coefficient("alpha").map(|c| c.value).unwrap_or(f64::NAN);
        println!("L = {l}: d = {a:.4} N^-{alpha:.4}");
        fits.insert(l, fit);
    }
    out.write_json("fits.json", &fits)
}

/// Gaussian noise/disorder sweeps over (L, sigma) grids, with the noise and
/// disorder scaling-law fits whenever the grid supports them.
pub fn noise_scan(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    if !matches!(cfg.run.engine, Engine::Majorana | Engine::Statevector) {
        return Err(CliError::Config(
            "noise-scan drives the gaussian model; use the majorana or statevector engine".into(),
        ));
    }
    let grid = cfg.n_grid();
    let window = cfg.fit_window(FitWindow::new(10, usize::MAX));
    let mut fits: BTreeMap<String, kzsim_core::FitResult> = BTreeMap::new();
    for &l in &cfg.run.l {
        let mut ideal: Option<DefectCurve> = None;
        let mut noise_sweeps: Vec<(f64, DefectCurve)> = Vec::new();
        let mut disorder_sweeps: Vec<(f64, DefectCurve)> = Vec::new();
        for &sn in &cfg.run.sigma_noise {
            for &sd in &cfg.run.sigma_disorder {
                let curve = engine_curve(cfg, l, sn, sd, &grid)?;
                let stem =
                    format!("curve_L{l}_sn{}_sd{}", sigma_label(sn), sigma_label(sd));
                out.write_curve(&curve, &stem)?;
                if sn == 0.0 && sd == 0.0 {
                    ideal = Some(curve);
                } else if sd == 0.0 {
                    noise_sweeps.push((sn, curve));
                } else if sn == 0.0 {
                    disorder_sweeps.push((sd, curve));
                }
            }
        }
        if let Some(ideal) = &ideal {
            if noise_sweeps.len() >= 2 {
                let fit = fit_noise_law(&noise_sweeps, ideal, window).map_err(data_err)?;
                fits.insert(format!("noise_L{l}"), fit);
            }
            if disorder_sweeps.len() >= 2 {
                let fit = fit_disorder_law(&disorder_sweeps, ideal, window).map_err(data_err)?;
                fits.insert(format!("disorder_L{l}"), fit);
            }
        }
    }
    if !fits.is_empty() {
        out.write_json("fits.json", &fits)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct NOptRow {
    sigma_noise: f64,
    n_opt: usize,
    d_min: f64,
    band_lo: usize,
    band_hi: usize,
    boundary: bool,
}

#[derive(Serialize)]
struct NOptFit {
    exponent: f64,
    exponent_err: f64,
    prefactor: f64,
    /// Prefactor with the exponent held at -4/3.
    prefactor_fixed: f64,
    n_points: usize,
    boundary_sigmas: Vec<f64>,
}

/// Optimal depth versus noise strength, with a power-law fit over the
/// interior minima.
pub fn nopt_scan(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    if !matches!(cfg.run.engine, Engine::Majorana | Engine::Statevector) {
        return Err(CliError::Config(
            "nopt-scan drives the gaussian model; use the majorana or statevector engine".into(),
        ));
    }
    let sigmas: Vec<f64> = cfg.run.sigma_noise.iter().copied().filter(|&s| s > 0.0).collect();
    if sigmas.len() < 2 {
        return Err(CliError::Config("nopt-scan needs >= 2 nonzero sigma_noise values".into()));
    }
    let (lo, hi) = sigmas.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| {
        (lo.min(s), hi.max(s))
    });
    if hi / lo < 10.0 {
        return Err(CliError::Config(
            "sigma_noise grid must span at least one decade".into(),
        ));
    }
    let grid = cfg.n_grid();
    let mut fits = BTreeMap::new();
    for &l in &cfg.run.l {
        let mut rows = Vec::new();
        for &sn in &sigmas {
            let curve = engine_curve(cfg, l, sn, 0.0, &grid)?;
            out.write_curve(&curve, &format!("nopt_curve_L{l}_sn{}", sigma_label(sn)))?;
            let opt = find_n_opt(&curve).map_err(data_err)?;
            rows.push(NOptRow {
                sigma_noise: sn,
                n_opt: opt.n_opt,
                d_min: opt.d_min,
                band_lo: opt.band.0,
                band_hi: opt.band.1,
                boundary: opt.boundary,
            });
        }
        let mut csv = String::from("sigma_noise,n_opt,d_min,band_lo,band_hi,boundary\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.sigma_noise, r.n_opt, r.d_min, r.band_lo, r.band_hi, r.boundary
            ));
        }
        out.write_text(&format!("nopt_L{l}.csv"), &csv)?;

        let interior: Vec<&NOptRow> = rows.iter().filter(|r| !r.boundary).collect();
        if interior.len() < 2 {
            return Err(CliError::Data(format!(
                "L = {l}: fewer than two interior minima; widen the N grid"
            )));
        }
        let x: Vec<f64> = interior.iter().map(|r| r.sigma_noise.ln()).collect();
        let y: Vec<f64> = interior.iter().map(|r| (r.n_opt as f64).ln()).collect();
        let line = fit_line(&x, &y, None);
        let prefactor_fixed = (interior
            .iter()
            .map(|r| (r.n_opt as f64 * r.sigma_noise.powf(4.0 / 3.0)).ln())
            .sum::<f64>()
            / interior.len() as f64)
            .exp();
        let fit = NOptFit {
            exponent: line.slope,
            exponent_err: line.slope_err,
            prefactor: line.intercept.exp(),
            prefactor_fixed,
            n_points: interior.len(),
            boundary_sigmas: rows.iter().filter(|r| r.boundary).map(|r| r.sigma_noise).collect(),
        };
        println!(
            "L = {l}: N_opt = {:.4} sigma^{:.3} ({} points)",
            fit.prefactor, fit.exponent, fit.n_points
        );
        fits.insert(l, fit);
    }
    out.write_json("fits.json", &fits)
}

fn dense_point(
    cfg: &Config,
    l: usize,
    n: usize,
    model: &NoiseModel,
    tag: u64,
) -> CliResult<CurvePoint> {
    // N = 0 is the bare Hadamard layer: |+><+|^L before any Trotter step.
    let rho = if n == 0 {
        kzsim_core::dense::density::DensityMatrix::plus_state(l).map_err(data_err)?
    } else {
        let schedule = build_schedule(n).map_err(data_err)?;
        let perturbed = PerturbedSchedule::ideal(&schedule, l).map_err(data_err)?;
        run_noisy_circuit(&perturbed, model).map_err(data_err)?
    };
    let (d, err, shots) = if cfg.run.shots > 0 {
        let seed = derive_key(cfg.run.seed, &[tag, n as u64]);
        let samples = sample_bitstrings_density(&rho, cfg.run.shots, seed);
        let (d, err) = defect_density_from_bitstrings(&samples).map_err(data_err)?;
        (d, err, cfg.run.shots)
    } else {
        (rho.defect_density(), 0.0, 1)
    };
    Ok(CurvePoint {
        n,
        d,
        err,
        n_realizations: shots,
    })
}

fn dense_curve(cfg: &Config, l: usize, model: &NoiseModel, tag: u64, grid: &[usize]) -> CliResult<DefectCurve> {
    let mut points = Vec::with_capacity(grid.len());
    for &n in grid {
        points.push(dense_point(cfg, l, n, model, tag)?);
    }
    let curve = DefectCurve {
        points,
        meta: CurveMeta {
            l,
            sigma_noise: 0.0,
            sigma_disorder: 0.0,
            engine: Engine::DensityMatrix,
            seed: cfg.run.seed,
        },
    };
    curve.validate().map_err(data_err)?;
    Ok(curve)
}

/// Stochastic-Pauli and T1-T2 curves for one small chain on a shared N grid
/// (including the N=0 point), optionally alongside the gaussian-model curve.
pub fn dense_compare(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    let l = cfg.run.l[0];
    if l > 8 {
        return Err(CliError::Config(format!(
            "dense-compare needs L <= 8 for the density-matrix paths, got {l}"
        )));
    }
    let mut grid = cfg.n_grid();
    if grid[0] != 0 {
        grid.insert(0, 0);
    }
    let pauli = NoiseModel::Pauli(
        PauliChannelRates::uniform_with_fidelity(cfg.dense.fidelity)
            .map_err(|e| CliError::Config(e.to_string()))?,
    );
    let t1t2 = NoiseModel::T1T2(
        DampingParams::uniform(
            l,
            cfg.dense.t1,
            cfg.dense.t2,
            cfg.dense.dt_one_qubit,
            cfg.dense.dt_two_qubit,
        )
        .map_err(|e| CliError::Config(e.to_string()))?,
    );
    let pauli_curve = dense_curve(cfg, l, &pauli, 1, &grid)?;
    out.write_curve(&pauli_curve, "dense_pauli")?;
    let t1t2_curve = dense_curve(cfg, l, &t1t2, 2, &grid)?;
    out.write_curve(&t1t2_curve, "dense_t1t2")?;
    if cfg.dense.gaussian {
        let mut ideal_cfg = cfg.clone();
        ideal_cfg.run.engine = Engine::Majorana;
        let curve = engine_curve(&ideal_cfg, l, 0.0, 0.0, &grid)?;
        out.write_curve(&curve, "dense_gaussian")?;
    }
    for (name, curve) in [("pauli", &pauli_curve), ("t1t2", &t1t2_curve)] {
        let opt = find_n_opt(curve).map_err(data_err)?;
        println!(
            "{name}: N_opt = {}{}",
            opt.n_opt,
            if opt.boundary { " (boundary)" } else { "" }
        );
    }
    Ok(())
}

/// Parses a bitstring filename of the form `L{L}_N{N}.txt`.
pub fn parse_bitstring_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('L')?.strip_suffix(".txt")?;
    let (l_part, n_part) = rest.split_once("_N")?;
    Some((l_part.parse().ok()?, n_part.parse().ok()?))
}

#[derive(Serialize)]
struct IngestReport {
    per_l: BTreeMap<usize, SigmaReport>,
    sigma_noise_decreases_with_l: Option<bool>,
    sigma_disorder_decreases_with_l: Option<bool>,
}

/// Reads externally measured bitstring files, builds per-L defect curves,
/// and extracts effective (sigma_noise, sigma_disorder) against the ideal
/// free-fermion curves.
pub fn ingest_fit(cfg: &Config, dir: &Path, out: &mut OutputDir) -> CliResult<()> {
    let mut groups: BTreeMap<usize, BTreeMap<usize, std::path::PathBuf>> = BTreeMap::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry.map_err(data_err)?;
        let name = entry.file_name();
        if let Some((l, n)) = name.to_str().and_then(parse_bitstring_name) {
            groups.entry(l).or_default().insert(n, entry.path());
        }
    }
    if groups.is_empty() {
        return Err(CliError::Config(format!(
            "no files matching L{{L}}_N{{N}}.txt in {}",
            dir.display()
        )));
    }
    let window = cfg.fit_window(FitWindow::new(0, 11));
    let mut per_l = BTreeMap::new();
    for (&l, files) in &groups {
        let mut points = Vec::new();
        for (&n, path) in files {
            let text = std::fs::read_to_string(path).map_err(data_err)?;
            let samples: Vec<String> = text.lines().map(str::to_owned).collect();
            if samples.iter().any(|s| s.len() != l) {
                return Err(CliError::Data(format!(
                    "{}: bitstring length does not match L = {l}",
                    path.display()
                )));
            }
            let (d, err) = defect_density_from_bitstrings(&samples)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            points.push(CurvePoint {
                n,
                d,
                err,
                n_realizations: samples.len(),
            });
        }
        let measured = DefectCurve {
            points,
            meta: CurveMeta {
                l,
                sigma_noise: 0.0,
                sigma_disorder: 0.0,
                engine: Engine::External,
                seed: 0,
            },
        };
        measured.validate().map_err(data_err)?;
        out.write_curve(&measured, &format!("measured_L{l}"))?;

        let grid: Vec<usize> = measured.points.iter().map(|p| p.n).collect();
        let ideal = defect_curve(&CurveSpec {
            engine: Engine::Majorana,
            l,
            n_grid: grid,
            sigma_noise: 0.0,
            sigma_disorder: 0.0,
            n_realizations: 1,
            seed: cfg.run.seed,
        })
        .map_err(data_err)?;
        let report = extract_sigma(&measured, &ideal, window, cfg.fit.a_noise, cfg.fit.a_disorder)
            .map_err(data_err)?;
        println!(
            "L = {l}: sigma_noise = {:.4} +- {:.4}, sigma_disorder = {:.4} +- {:.4}",
            report.unit.sigma_noise,
            report.unit.sigma_noise_err,
            report.unit.sigma_disorder,
            report.unit.sigma_disorder_err
        );
        per_l.insert(l, report);
    }
    let decreasing = |value: fn(&SigmaReport) -> f64| -> Option<bool> {
        if per_l.len() < 2 {
            return None;
        }
        let vals: Vec<f64> = per_l.values().map(value).collect();
        Some(vals.windows(2).all(|w| w[1] < w[0]))
    };
    let report = IngestReport {
        sigma_noise_decreases_with_l: decreasing(|r| r.unit.sigma_noise),
        sigma_disorder_decreases_with_l: decreasing(|r| r.unit.sigma_disorder),
        per_l,
    };
    out.write_json("sigma_report.json", &report)
}

#[derive(Serialize)]
struct Prediction {
    sigma_noise: f64,
    n_opt: f64,
}

/// Closed-form optimal depth from fitted amplitudes.
pub fn predict_nopt(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    if cfg.predict.sigma.is_empty() {
        return Err(CliError::Config(
            "predict-nopt needs at least one sigma (predict.sigma or --sigma)".into(),
        ));
    }
    let mut rows = Vec::new();
    for &s in &cfg.predict.sigma {
        let n = predict_n_opt(cfg.predict.a_ideal, cfg.predict.a_noise, s)
            .map_err(|e| CliError::Config(e.to_string()))?;
        println!("sigma = {s}: N_opt = {n:.2}");
        rows.push(Prediction {
            sigma_noise: s,
            n_opt: n,
        });
    }
    out.write_json("predictions.json", &rows)
}

/// Single-qubit random-walk check: Monte-Carlo average against the closed
/// form 1 - exp(-N sigma^2 / 2).
pub fn random_walk(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    if cfg.walk.realizations < 2 {
        return Err(CliError::Config("walk.realizations must be >= 2".into()));
    }
    if cfg.walk.n.is_empty() || cfg.walk.sigma.is_empty() {
        return Err(CliError::Config("walk.n and walk.sigma must be non-empty".into()));
    }
    let mut csv = String::from("n,sigma,predicted,mc_mean,mc_err\n");
    let mut worst = 0.0f64;
    for &n in &cfg.walk.n {
        for &s in &cfg.walk.sigma {
            let predicted = random_walk_prediction(n as f64, s);
            let (mean, err) =
                random_walk_monte_carlo(n, s, cfg.walk.realizations, cfg.run.seed)
                    .map_err(data_err)?;
            if err > 0.0 {
                worst = worst.max((mean - predicted).abs() / err);
            }
            csv.push_str(&format!("{n},{s},{predicted},{mean},{err}\n"));
        }
    }
    println!(
        "worst |mc - closed form| = {worst:.2} standard errors over {} realizations",
        cfg.walk.realizations
    );
    out.write_text("random_walk.csv", &csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_names_parse() {
        assert_eq!(parse_bitstring_name("L6_N11.txt"), Some((6, 11)));
        assert_eq!(parse_bitstring_name("L120_N3.txt"), Some((120, 3)));
        assert_eq!(parse_bitstring_name("L6N11.txt"), None);
        assert_eq!(parse_bitstring_name("L6_N11.csv"), None);
        assert_eq!(parse_bitstring_name("notes.txt"), None);
    }
}
