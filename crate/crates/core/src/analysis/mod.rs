//! Defect-curve containers and the scaling-law fitting toolkit.

pub mod curve;
pub mod fits;
pub mod wls;

pub use curve::{CurveMeta, CurvePoint, DefectCurve, Engine};
pub use fits::{
    extract_sigma, find_n_opt, fit_disorder_law, fit_kz, fit_noise_law, predict_n_opt,
    random_walk_monte_carlo, random_walk_prediction, FitCoefficient, FitModel, FitResult, FitWindow, NOptResult,
    SigmaExtraction, SigmaReport,
};
