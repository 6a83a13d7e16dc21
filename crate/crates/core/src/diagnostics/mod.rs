//! Chain diagnostics: autocorrelation, effective sample size, conductance, spectral gaps,
//! Kolmogorov–Smirnov distances and power-law fits.

mod acf;
mod conductance;
mod ess;
mod ks;
mod spectral;

use serde::{Deserialize, Serialize};

pub use acf::{acf, acf_pooled, autocovariance};
pub use conductance::{
    conductance_estimate, conductance_from_thresholds, conductance_with, Conductance, DEFAULT_THRESHOLDS,
};
pub use ess::{default_truncation, ess, iat, EssMethod};
pub use ks::{ks_critical_99, ks_distance, ks_distance_two_sample};
pub use spectral::{discretize_rwm, grid_spectral_gap, DiscreteKernel};

use crate::error::{Error, Result};
use crate::models::PosteriorOracle;

/// Least-squares fit of `log statistic = intercept + slope · log n`.
pub fn scaling_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 points for a slope, got {}",
            points.len()
        )));
    }
    if let Some((n, s)) = points.iter().find(|(n, s)| !(*n > 0.0 && *s > 0.0)) {
        return Err(Error::domain(format!("points must be positive, got ({n}, {s})")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain("need at least two distinct n values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub acf: Vec<f64>,
    pub ess_truncated: f64,
    pub ess_geyer: f64,
    pub iat: f64,
    pub ks_to_oracle: Option<f64>,
    pub conductance: Option<Conductance>,
    pub accept_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct DiagnoseOptions<'a> {
    /// Largest lag kept in the reported ACF vector.
    pub max_lag: usize,
    /// Truncation lag of the truncated ESS estimator.
    pub truncation: usize,
    pub oracle: Option<&'a PosteriorOracle>,
    pub accept_flags: Option<&'a [bool]>,
    pub thresholds: usize,
}

impl Default for DiagnoseOptions<'_> {
    fn default() -> Self {
        Self {
            max_lag: 50,
            truncation: 100,
            oracle: None,
            accept_flags: None,
            thresholds: DEFAULT_THRESHOLDS,
        }
    }
}

/// Runs every applicable estimator on one scalar series.
///
/// Conductance is only reported when an oracle is given and the trace is long enough.
pub fn diagnose(series: &[f64], opts: &DiagnoseOptions<'_>) -> Result<DiagnosticsReport> {
    let max_lag = opts.max_lag.min(series.len().saturating_sub(1));
    let acf = acf(series, max_lag)?;
    let ess_truncated = ess(series, EssMethod::Truncated(opts.truncation))?;
    let ess_geyer = ess(series, EssMethod::Geyer)?;
    let iat = series.len() as f64 / ess_geyer;
    let ks_to_oracle = opts.oracle.map(|o| ks_distance(series, |x| o.cdf(x)));
    let conductance = match opts.oracle {
        Some(o) if series.len() >= 10 * opts.thresholds => {
            Some(conductance_estimate(series, o, opts.thresholds)?)
        }
        _ => None,
    };
    let accept_rate = opts.accept_flags.filter(|f| !f.is_empty()).map(|f| {
        f.iter().filter(|&&a| a).count() as f64 / f.len() as f64
    });
    Ok(DiagnosticsReport {
        acf,
        ess_truncated,
        ess_geyer,
        iat,
        ks_to_oracle,
        conductance,
        accept_rate,
    })
}
