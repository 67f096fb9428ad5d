//! Small weighted least-squares kernels used by all fits.
//!
//! When per-point errors are supplied, weights are `1/err^2` and parameter
//! uncertainties come from the inverse normal matrix. Without errors the
//! residual variance is used instead (`chi2/dof` scaling).

/// Result of a one- or two-parameter linear fit.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub intercept_err: f64,
    pub slope_err: f64,
    pub chi2: f64,
    pub dof: usize,
}

fn weights(errors: Option<&[f64]>, n: usize) -> Vec<f64> {
    match errors {
        Some(errs) if errs.iter().all(|&e| e > 0.0) => {
            errs.iter().map(|&e| 1.0 / (e * e)).collect()
        }
        _ => vec![1.0; n],
    }
}

fn errors_known(errors: Option<&[f64]>) -> bool {
    matches!(errors, Some(errs) if errs.iter().all(|&e| e > 0.0))
}

/// Weighted fit of `y = intercept + slope * x`.
pub fn fit_line(x: &[f64], y: &[f64], errors: Option<&[f64]>) -> LinearFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "line fit needs at least 2 points");
    let w = weights(errors, x.len());
    let sw: f64 = w.iter().sum();
    let swx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let swy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let swxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let swxy: f64 = w
        .iter()
        .zip(x.iter().zip(y))
        .map(|(w, (x, y))| w * x * y)
        .sum();
    let det = sw * swxx - swx * swx;
    let slope = (sw * swxy - swx * swy) / det;
    let intercept = (swxx * swy - swx * swxy) / det;
    let chi2: f64 = w
        .iter()
        .zip(x.iter().zip(y))
        .map(|(w, (x, y))| {
            let r = y - intercept - slope * x;
            w * r * r
        })
        .sum();
    let dof = x.len().saturating_sub(2);
    let scale = if errors_known(errors) {
        1.0
    } else if dof > 0 {
        chi2 / dof as f64
    } else {
        0.0
    };
    LinearFit {
        intercept,
        slope,
        intercept_err: (scale * swxx / det).sqrt(),
        slope_err: (scale * sw / det).sqrt(),
        chi2,
        dof,
    }
}

/// Weighted fit of `y = slope * x` (through the origin).
pub fn fit_proportional(x: &[f64], y: &[f64], errors: Option<&[f64]>) -> (f64, f64, f64, usize) {
    assert_eq!(x.len(), y.len());
    assert!(!x.is_empty());
    let w = weights(errors, x.len());
    let swxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let swxy: f64 = w
        .iter()
        .zip(x.iter().zip(y))
        .map(|(w, (x, y))| w * x * y)
        .sum();
    let slope = swxy / swxx;
    let chi2: f64 = w
        .iter()
        .zip(x.iter().zip(y))
        .map(|(w, (x, y))| {
            let r = y - slope * x;
            w * r * r
        })
        .sum();
    let dof = x.len().saturating_sub(1);
    let scale = if errors_known(errors) {
        1.0
    } else if dof > 0 {
        chi2 / dof as f64
    } else {
        0.0
    };
    (slope, (scale / swxx).sqrt(), chi2, dof)
}

/// Weighted mean with its standard error.
pub fn weighted_mean(y: &[f64], errors: Option<&[f64]>) -> (f64, f64) {
    assert!(!y.is_empty());
    let w = weights(errors, y.len());
    let sw: f64 = w.iter().sum();
    let mean = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() / sw;
    if errors_known(errors) {
        (mean, (1.0 / sw).sqrt())
    } else {
        let n = y.len() as f64;
        let var = y.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
        (mean, (var / n.max(1.0)).sqrt())
    }
}

/// Coefficient of determination of `y` against a linear model in `x`.
pub fn r_squared(x: &[f64], y: &[f64], intercept: f64, slope: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    }
}
