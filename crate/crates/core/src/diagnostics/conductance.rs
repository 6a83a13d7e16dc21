use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::PosteriorOracle;

/// Default number of thresholds between the 1% and 99% stationary quantiles.
pub const DEFAULT_THRESHOLDS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conductance {
    pub kappa_hat: f64,
    pub argmin_threshold: f64,
}

/// Empirical conductance of a stationary trace over the lower half-lines `(-∞, m]`.
///
/// For each threshold `m`, the fraction of transitions that cross upward through `m` is
/// divided by `F(m)(1 − F(m))`, with `F` the oracle distribution function. Thresholds
/// are the oracle quantiles at an even grid from 1% to 99%.
pub fn conductance_estimate(
    series: &[f64],
    oracle: &PosteriorOracle,
    thresholds: usize,
) -> Result<Conductance> {
    conductance_with(series, |p| oracle.quantile(p), thresholds)
}

/// As [`conductance_estimate`] with the stationary quantile function supplied directly.
pub fn conductance_with<Q: Fn(f64) -> Result<f64>>(
    series: &[f64],
    quantile: Q,
    thresholds: usize,
) -> Result<Conductance> {
    if thresholds == 0 {
        return Err(Error::domain("need at least one threshold"));
    }
    if series.len() < 10 * thresholds {
        return Err(Error::InsufficientData(format!(
            "trace of length {} is shorter than 10 x {thresholds} thresholds",
            series.len()
        )));
    }
    let grid: Vec<(f64, f64)> = (0..thresholds)
        .map(|k| {
            let p = if thresholds == 1 {
                0.5
            } else {
                0.01 + 0.98 * k as f64 / (thresholds - 1) as f64
            };
            quantile(p).map(|m| (m, p))
        })
        .collect::<Result<_>>()?;
    conductance_from_thresholds(series, &grid)
}

/// Minimum over `(m, F(m))` pairs of the normalized upward crossing rate.
///
/// Thresholds must be sorted by `m`. Counting uses a difference array, so the cost is
/// `O(T log M + M)`.
pub fn conductance_from_thresholds(series: &[f64], grid: &[(f64, f64)]) -> Result<Conductance> {
    if series.len() < 2 {
        return Err(Error::InsufficientData("need at least two states".into()));
    }
    if grid.is_empty() {
        return Err(Error::domain("empty threshold grid"));
    }
    if grid.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(Error::domain("thresholds must be sorted"));
    }
    let ms: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let mut diff = vec![0i64; ms.len() + 1];
    for w in series.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        // thresholds m with a <= m < b
        let lo = ms.partition_point(|&m| m < a);
        let hi = ms.partition_point(|&m| m < b);
        if lo < hi {
            diff[lo] += 1;
            diff[hi] -= 1;
        }
    }
    let transitions = (series.len() - 1) as f64;
    let mut running = 0i64;
    let mut best = Conductance {
        kappa_hat: f64::INFINITY,
        argmin_threshold: f64::NAN,
    };
    for (k, &(m, p)) in grid.iter().enumerate() {
        running += diff[k];
        let denom = p * (1.0 - p);
        if !(denom > 0.0) {
            continue;
        }
        let kappa = running as f64 / transitions / denom;
        if kappa < best.kappa_hat {
            best = Conductance {
                kappa_hat: kappa,
                argmin_threshold: m,
            };
        }
    }
    if !best.kappa_hat.is_finite() {
        return Err(Error::domain("no threshold with 0 < F(m) < 1"));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{normal_quantile, RngStream};
    use crate::models::{quadrature_oracle, InterceptModel};

    #[test]
    fn two_state_chain() {
        // exhaustive: states ±1 with flip probability q, stationary (1/2, 1/2).
        // The only nontrivial cut has flow q/2 and normalizer 1/4, so κ = 2q.
        let q = 0.2;
        let mut rng = RngStream::new(9, 0);
        let mut x = -1.0;
        let series: Vec<f64> = (0..200_000)
            .map(|_| {
                if rng.open01() < q {
                    x = -x;
                }
                x
            })
            .collect();
        let c = conductance_from_thresholds(&series, &[(0.0, 0.5)]).unwrap();
        assert!((c.kappa_hat / (2.0 * q) - 1.0).abs() < 0.1, "{}", c.kappa_hat);
    }

    #[test]
    fn iid_draws_have_unit_conductance() {
        // Independent draws cross m upward with probability F(m)(1 - F(m)) exactly.
        let o = quadrature_oracle(&InterceptModel::logit(1, 100, 100.0).unwrap()).unwrap();
        let mut rng = RngStream::new(10, 0);
        let series: Vec<f64> = (0..1_000_000).map(|_| o.sample(&mut rng)).collect();
        let c = conductance_estimate(&series, &o, 64).unwrap();
        assert!((0.9..=1.1).contains(&c.kappa_hat), "{}", c.kappa_hat);
    }

    #[test]
    fn monotone_transform_leaves_counts_unchanged() {
        let mut rng = RngStream::new(11, 0);
        let series: Vec<f64> = (0..20_000).map(|_| normal_quantile(rng.open01()).unwrap()).collect();
        let a = conductance_with(&series, normal_quantile, 128).unwrap();
        let mapped: Vec<f64> = series.iter().map(|x| x.exp()).collect();
        let b = conductance_with(&mapped, |p| normal_quantile(p).map(f64::exp), 128).unwrap();
        assert_eq!(a.kappa_hat, b.kappa_hat);
        assert!((a.argmin_threshold.exp() - b.argmin_threshold).abs() < 1e-12);
    }

    #[test]
    fn short_trace_rejected() {
        assert!(matches!(
            conductance_with(&[0.0; 100], normal_quantile, 512),
            Err(Error::InsufficientData(_))
        ));
    }
}
