use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Lags up to which the direct O(T·K) sum is used instead of an FFT.
const DIRECT_MAX_LAG: usize = 64;

/// Sample autocorrelations at lags `0..=max_lag` using the biased (1/T) autocovariance.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let gamma = autocovariance(series, max_lag)?;
    let g0 = gamma[0];
    Ok(gamma.iter().map(|g| g / g0).collect())
}

/// Autocorrelations of several chains: per-chain autocovariances (each chain centered
/// at its own mean) are averaged with weights proportional to chain length, then
/// normalized by the pooled lag-0 value.
pub fn acf_pooled(chains: &[&[f64]], max_lag: usize) -> Result<Vec<f64>> {
    if chains.is_empty() {
        return Err(Error::InsufficientData("no chains supplied".into()));
    }
    let mut pooled = vec![0.0; max_lag + 1];
    let mut total = 0.0;
    for chain in chains {
        check_length(chain, max_lag)?;
        let g = raw_autocovariance(chain, max_lag);
        let w = chain.len() as f64;
        for (p, v) in pooled.iter_mut().zip(&g) {
            *p += w * v;
        }
        total += w;
    }
    let g0 = pooled[0] / total;
    if !(g0 > 0.0) {
        return Err(Error::DegenerateSeries("all chains are constant".into()));
    }
    Ok(pooled.iter().map(|g| g / total / g0).collect())
}

/// Biased autocovariances at lags `0..=max_lag`.
pub fn autocovariance(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    check_length(series, max_lag)?;
    let g = raw_autocovariance(series, max_lag);
    if !(g[0] > 0.0) || !g[0].is_finite() {
        return Err(Error::DegenerateSeries(format!(
            "series of length {} has variance {}",
            series.len(),
            g[0]
        )));
    }
    Ok(g)
}

fn check_length(series: &[f64], max_lag: usize) -> Result<()> {
    if series.len() <= max_lag {
        return Err(Error::InsufficientData(format!(
            "series length {} must exceed the maximum lag {max_lag}",
            series.len()
        )));
    }
    Ok(())
}

fn raw_autocovariance(series: &[f64], max_lag: usize) -> Vec<f64> {
    if max_lag <= DIRECT_MAX_LAG {
        direct(series, max_lag)
    } else {
        via_fft(series, max_lag)
    }
}

fn centered(series: &[f64]) -> Vec<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    series.iter().map(|x| x - mean).collect()
}

fn direct(series: &[f64], max_lag: usize) -> Vec<f64> {
    let x = centered(series);
    let t = x.len() as f64;
    (0..=max_lag)
        .map(|k| x[..x.len() - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum::<f64>() / t)
        .collect()
}

fn via_fft(series: &[f64], max_lag: usize) -> Vec<f64> {
    let x = centered(series);
    let size = (2 * x.len()).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * x.len() as f64);
    buf[..=max_lag].iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::distributions::RngStream;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn ar1(rho: f64, t: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        let sd = (1.0 - rho * rho).sqrt();
        let mut x: f64 = StandardNormal.sample(&mut rng);
        (0..t)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                x = rho * x + sd * e;
                x
            })
            .collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let a = acf(&ar1(0.5, 1000, 1), 10).unwrap();
        assert_eq!(a[0], 1.0);
    }

    #[test]
    fn iid_lag_one_small() {
        let t = 100_000;
        let a = acf(&ar1(0.0, t, 2), 1).unwrap();
        assert!(a[1].abs() < 4.0 / (t as f64).sqrt(), "{}", a[1]);
    }

    #[test]
    fn ar1_decay() {
        let a = acf(&ar1(0.9, 1_000_000, 3), 20).unwrap();
        for (k, v) in a.iter().enumerate() {
            assert!((v - 0.9f64.powi(k as i32)).abs() < 0.02, "lag {k}: {v}");
        }
    }

    #[test]
    fn fft_and_direct_agree() {
        let x = ar1(0.7, 5000, 4);
        let d = direct(&x, 200);
        let f = via_fft(&x, 200);
        for (a, b) in d.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(acf(&[2.0; 50], 3), Err(Error::DegenerateSeries(_))));
        assert!(matches!(acf(&[1.0, 2.0], 2), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn pooled_equals_single_for_one_chain() {
        let x = ar1(0.5, 2000, 5);
        let a = acf(&x, 30).unwrap();
        let p = acf_pooled(&[&x], 30).unwrap();
        for (u, v) in a.iter().zip(&p) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn affine_invariance(a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], b in -100.0f64..100.0, seed in 0u64..1000) {
            let x = ar1(0.6, 500, seed);
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let ax = acf(&x, 100).unwrap();
            let ay = acf(&y, 100).unwrap();
            for (u, v) in ax.iter().zip(&ay) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }
}
