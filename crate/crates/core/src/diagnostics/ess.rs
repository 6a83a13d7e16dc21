use serde::{Deserialize, Serialize};

use super::acf::autocovariance;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EssMethod {
    /// `1 + 2·Σ_{k=1}^{K} acf(k)` with a fixed truncation lag `K` (clamped to `T − 1`).
    Truncated(usize),
    /// Geyer's initial positive sequence.
    Geyer,
}

/// Default truncation lag: `min(n, T/10)`, at least 1.
pub fn default_truncation(n: u64, len: usize) -> usize {
    (n.min((len / 10) as u64) as usize).max(1)
}

/// Integrated autocorrelation time estimate, floored at 1.
pub fn iat(series: &[f64], method: EssMethod) -> Result<f64> {
    let t = series.len();
    let rho = match method {
        EssMethod::Truncated(k) => {
            let k = k.min(t.saturating_sub(1)).max(1);
            let g = autocovariance(series, k)?;
            1.0 + 2.0 * g[1..].iter().sum::<f64>() / g[0]
        }
        EssMethod::Geyer => geyer(series)?,
    };
    Ok(rho.max(1.0))
}

/// Effective sample size `T / IAT`, so `0 < ess ≤ T`.
pub fn ess(series: &[f64], method: EssMethod) -> Result<f64> {
    Ok(series.len() as f64 / iat(series, method)?)
}

fn geyer(series: &[f64]) -> Result<f64> {
    let max_lag = series.len() - 1;
    let g = autocovariance(series, max_lag)?;
    let g0 = g[0];
    let mut sum = 0.0;
    let mut k = 0;
    while 2 * k + 1 <= max_lag {
        let pair = (g[2 * k] + g[2 * k + 1]) / g0;
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 1;
    }
    Ok(2.0 * sum - 1.0)
}
