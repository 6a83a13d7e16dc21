/// Kolmogorov–Smirnov distance between the empirical distribution of `series` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(series: &[f64], cdf: F) -> f64 {
    if series.is_empty() {
        return 1.0;
    }
    let mut xs = series.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // group ties so the empirical cdf jumps once per distinct value
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the one-sample KS statistic at level 1%, asymptotic form.
pub fn ks_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{normal_cdf, normal_quantile, RngStream};

    fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..n).map(|_| normal_quantile(rng.open01()).unwrap()).collect()
    }

    #[test]
    fn null_distribution_within_band() {
        let x = normal_draws(10_000, 1);
        assert!(ks_distance(&x, normal_cdf) < ks_critical_99(x.len()));
    }

    #[test]
    fn shifted_distribution_detected() {
        let x = normal_draws(10_000, 2);
        assert!(ks_distance(&x, |v| normal_cdf(v - 1.0)) > 0.3);
    }

    #[test]
    fn point_mass_far_from_continuous() {
        assert!(ks_distance(&[0.3; 100], normal_cdf) >= 0.5);
    }

    #[test]
    fn exact_small_case() {
        // uniform cdf, sample {0.5}: sup is 1/2
        let d = ks_distance(&[0.5], |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-15);
        assert!((ks_distance_two_sample(&[0.0, 1.0], &[2.0, 3.0]) - 1.0).abs() < 1e-15);
        assert!(ks_distance_two_sample(&[1.0, 2.0], &[2.0, 1.0]).abs() < 1e-15);
    }

    #[test]
    fn two_sample_null() {
        let a = normal_draws(20_000, 3);
        let b = normal_draws(20_000, 4);
        assert!(ks_distance_two_sample(&a, &b) < 1.63 * (2.0 / 20_000f64).sqrt());
    }
}
