//! `kzsim`: batch driver for adiabatic Ising circuit sweeps.
//!
//! Subcommands: kz-scan, noise-scan, nopt-scan, dense-compare, ingest-fit,
//! predict-nopt, random-walk. Each invocation writes one output directory
//! containing a config snapshot, curve CSVs with metadata sidecars, fit
//! JSON, and a manifest. Exit codes: 0 success, 2 config error, 3 data
//! error.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kzsim_core::analysis::curve::Engine;

use config::{Config, Overrides};
use error::{CliError, CliResult};
use output::OutputDir;

fn parse_engine(s: &str) -> Result<Engine, String> {
    serde_json::from_str(&format!("\"{s}\"")).map_err(|_| {
        format!("unknown engine '{s}' (majorana, statevector, density-matrix, trajectories)")
    })
}

#[derive(Parser)]
#[command(name = "kzsim", version, about = "Noise-depth tradeoff sweeps for adiabatic Ising circuits")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: out/<subcommand>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 or omitted uses all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Simulation backend.
    #[arg(long, global = true, value_parser = parse_engine)]
    engine: Option<Engine>,
    /// Bitstrings per point; 0 means exact expectation values.
    #[arg(long, global = true)]
    shots: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noiseless defect curves over L with power-law fits.
    KzScan,
    /// Gaussian noise/disorder sweeps with scaling-law fits.
    NoiseScan,
    /// Optimal depth versus noise strength with a power-law fit.
    NoptScan,
    /// Pauli vs T1-T2 dense-model curves for one small chain.
    DenseCompare,
    /// Extract effective sigmas from measured bitstring files.
    IngestFit {
        /// Directory of L{L}_N{N}.txt files (overrides ingest.dir).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Closed-form optimal depth from fitted amplitudes.
    PredictNopt {
        /// Noise strengths to evaluate (repeatable; overrides predict.sigma).
        #[arg(long)]
        sigma: Vec<f64>,
        #[arg(long)]
        a_ideal: Option<f64>,
        #[arg(long)]
        a_noise: Option<f64>,
    },
    /// Single-qubit random-walk Monte-Carlo against the closed form.
    RandomWalk,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::KzScan => "kz-scan",
            Command::NoiseScan => "noise-scan",
            Command::NoptScan => "nopt-scan",
            Command::DenseCompare => "dense-compare",
            Command::IngestFit { .. } => "ingest-fit",
            Command::PredictNopt { .. } => "predict-nopt",
            Command::RandomWalk => "random-walk",
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        engine: cli.engine,
        shots: cli.shots,
    };
    let mut cfg = Config::load(cli.config.as_deref(), &overrides)?;

    // Per-subcommand flag overrides that live outside the common set.
    let ingest_dir = match &cli.command {
        Command::IngestFit { dir } => {
            let dir = dir.clone().or_else(|| cfg.ingest.dir.clone()).ok_or_else(|| {
                CliError::Config("ingest-fit needs a directory (--dir or ingest.dir)".into())
            })?;
            if !dir.is_dir() {
                return Err(CliError::Config(format!(
                    "{} is not a directory",
                    dir.display()
                )));
            }
            Some(dir)
        }
        Command::PredictNopt { sigma, a_ideal, a_noise } => {
            if !sigma.is_empty() {
                cfg.predict.sigma = sigma.clone();
            }
            if let Some(a) = a_ideal {
                cfg.predict.a_ideal = *a;
            }
            if let Some(a) = a_noise {
                cfg.predict.a_noise = *a;
            }
            None
        }
        _ => None,
    };

    let out_path = cfg
        .run
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(cli.command.name()));
    let mut out = OutputDir::create(&out_path, &cfg)?;

    match &cli.command {
        Command::KzScan => commands::kz_scan(&cfg, &mut out)?,
        Command::NoiseScan => commands::noise_scan(&cfg, &mut out)?,
        Command::NoptScan => commands::nopt_scan(&cfg, &mut out)?,
        Command::DenseCompare => commands::dense_compare(&cfg, &mut out)?,
        Command::IngestFit { .. } => commands::ingest_fit(&cfg, &ingest_dir.unwrap(), &mut out)?,
        Command::PredictNopt { .. } => commands::predict_nopt(&cfg, &mut out)?,
        Command::RandomWalk => commands::random_walk(&cfg, &mut out)?,
    }
    let seed = cfg.run.seed;
    out.finish(cli.command.name(), seed)?;
    println!("wrote {}", out_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let body = || match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    };
    match cli.jobs {
        Some(jobs) if jobs > 0 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
            match pool {
                Ok(pool) => pool.install(body),
                Err(e) => {
                    eprintln!("config error: cannot build thread pool: {e}");
                    ExitCode::from(2)
                }
            }
        }
        _ => body(),
    }
}
