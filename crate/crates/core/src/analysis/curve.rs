//! Defect-density curves and their CSV / JSON-sidecar serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which simulation backend produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Majorana,
    Statevector,
    DensityMatrix,
    Trajectories,
    External,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub d: f64,
    pub err: f64,
    pub n_realizations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveMeta {
    pub l: usize,
    pub sigma_noise: f64,
    pub sigma_disorder: f64,
    pub engine: Engine,
    pub seed: u64,
}

/// Mean defect density versus circuit depth, with standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectCurve {
    pub points: Vec<CurvePoint>,
    pub meta: CurveMeta,
}

impl DefectCurve {
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.d) {
                return Err(Error::MalformedData(format!(
                    "d = {} out of [0, 1] at N = {}",
                    p.d, p.n
                )));
            }
            if p.err < 0.0 || !p.err.is_finite() {
                return Err(Error::MalformedData(format!("bad err at N = {}", p.n)));
            }
            if i > 0 && p.n <= self.points[i - 1].n {
                return Err(Error::MalformedData(format!(
                    "N values must be strictly increasing (N = {})",
                    p.n
                )));
            }
        }
        Ok(())
    }

    /// The defect density at an exact N, if present.
    pub fn at(&self, n: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,d,err,n_realizations\n");
        for p in &self.points {
            writeln!(out, "{},{},{},{}", p.n, p.d, p.err, p.n_realizations).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, meta: CurveMeta) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "N,d,err,n_realizations" => {}
            other => {
                return Err(Error::MalformedData(format!(
                    "bad curve CSV header: {other:?}"
                )))
            }
        }
        let mut points = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::MalformedData(format!("bad curve CSV row: {line}")));
            }
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::MalformedData(format!("bad number {s:?}: {e}")))
            };
            points.push(CurvePoint {
                n: fields[0]
                    .parse()
                    .map_err(|e| Error::MalformedData(format!("bad N {:?}: {e}", fields[0])))?,
                d: parse_f(fields[1])?,
                err: parse_f(fields[2])?,
                n_realizations: fields[3]
                    .parse()
                    .map_err(|e| Error::MalformedData(format!("bad count: {e}")))?,
            });
        }
        let curve = Self { points, meta };
        curve.validate()?;
        Ok(curve)
    }

    /// Writes `<stem>.csv` and the `<stem>.meta.json` sidecar.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        std::fs::write(
            dir.join(format!("{stem}.meta.json")),
            serde_json::to_string_pretty(&self.meta)?,
        )?;
        Ok(())
    }

    /// Reads a curve written by [`DefectCurve::write`].
    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let meta: CurveMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.meta.json")))?)?;
        Self::from_csv(
            &std::fs::read_to_string(dir.join(format!("{stem}.csv")))?,
            meta,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_curve() -> DefectCurve {
        DefectCurve {
            points: vec![
                CurvePoint { n: 1, d: 0.4, err: 0.01, n_realizations: 10 },
                CurvePoint { n: 5, d: 0.2, err: 0.005, n_realizations: 10 },
                CurvePoint { n: 20, d: 0.1, err: 0.0, n_realizations: 1 },
            ],
            meta: CurveMeta {
                l: 16,
                sigma_noise: 0.01,
                sigma_disorder: 0.0,
                engine: Engine::Majorana,
                seed: 42,
            },
        }
    }

    #[test]
    fn csv_round_trip() {
        let curve = sample_curve();
        let back = DefectCurve::from_csv(&curve.to_csv(), curve.meta.clone()).unwrap();
        assert_eq!(curve.points.len(), back.points.len());
        for (a, b) in curve.points.iter().zip(&back.points) {
            assert_eq!(a.n, b.n);
            assert_eq!(a.d, b.d);
            assert_eq!(a.err, b.err);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let curve = sample_curve();
        curve.write(dir.path(), "curve_L16").unwrap();
        let back = DefectCurve::read(dir.path(), "curve_L16").unwrap();
        assert_eq!(back.meta.l, 16);
        assert_eq!(back.points[1].d, 0.2);
    }

    #[test]
    fn validation_rejects_bad_curves() {
        let mut c = sample_curve();
        c.points[1].d = 1.5;
        assert!(c.validate().is_err());
        let mut c = sample_curve();
        c.points[2].n = 5;
        assert!(c.validate().is_err());
        let mut c = sample_curve();
        c.points[0].err = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        let meta = sample_curve().meta;
        assert!(DefectCurve::from_csv("nope\n1,2,3,4\n", meta.clone()).is_err());
        assert!(
            DefectCurve::from_csv("N,d,err,n_realizations\n1,0.2\n", meta).is_err()
        );
    }
}
