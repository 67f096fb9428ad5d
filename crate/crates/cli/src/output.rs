//! Output directory layout: every invocation gets one directory holding a
//! config snapshot, curve CSVs with JSON metadata sidecars, fit JSON, and a
//! machine-readable manifest. All artifacts are byte-deterministic for a
//! given config and seed.

use std::path::{Path, PathBuf};

use kzsim_core::DefectCurve;
use serde::Serialize;

use crate::config::Config;
use crate::error::{data_err, CliError, CliResult};

pub struct OutputDir {
    path: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    /// Creates the directory (parents included) and writes the resolved
    /// config snapshot. The snapshot omits the output path itself so that
    /// runs differing only in destination stay byte-identical.
    pub fn create(path: &Path, config: &Config) -> CliResult<OutputDir> {
        std::fs::create_dir_all(path)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
        let mut snapshot = config.clone();
        snapshot.run.out = None;
        let text = toml::to_string_pretty(&snapshot)
            .map_err(|e| CliError::Data(format!("config snapshot: {e}")))?;
        let mut out = OutputDir {
            path: path.to_path_buf(),
            files: Vec::new(),
        };
        out.write_text("config.toml", &text)?;
        Ok(out)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        std::fs::write(self.path.join(name), text).map_err(data_err)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(data_err)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Writes `<stem>.csv` and `<stem>.meta.json`.
    pub fn write_curve(&mut self, curve: &DefectCurve, stem: &str) -> CliResult<()> {
        curve.write(&self.path, stem).map_err(data_err)?;
        self.files.push(format!("{stem}.csv"));
        self.files.push(format!("{stem}.meta.json"));
        Ok(())
    }

    /// Writes the manifest and consumes the directory handle.
    pub fn finish(mut self, subcommand: &str, seed: u64) -> CliResult<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            subcommand: &'a str,
            seed: u64,
            config: &'a str,
            files: &'a [String],
        }
        self.files.sort();
        let manifest = Manifest {
            subcommand,
            seed,
            config: "config.toml",
            files: &self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(data_err)?;
        text.push('\n');
        std::fs::write(self.path.join("manifest.json"), text).map_err(data_err)?;
        Ok(())
    }
}

/// Filename-safe rendering of a sigma value (shortest f64 round trip).
pub fn sigma_label(sigma: f64) -> String {
    format!("{sigma}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Config::default();
        let mut out = OutputDir::create(dir.path(), &cfg).unwrap();
        out.write_text("b.txt", "x").unwrap();
        out.write_text("a.txt", "y").unwrap();
        out.finish("kz-scan", 7).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["subcommand"], "kz-scan");
        let files: Vec<_> = manifest["files"].as_array().unwrap().to_vec();
        assert_eq!(files[0], "a.txt");
        assert!(files.contains(&serde_json::json!("config.toml")));
    }

    #[test]
    fn sigma_labels_round_trip() {
        for &s in &[0.0, 0.001, 0.15, 2e-4] {
            assert_eq!(sigma_label(s).parse::<f64>().unwrap(), s);
        }
    }
}
