//! Chains started from exact posterior draws must stay at the posterior.
//!
//! Many short independent chains are initialized from oracle draws; the cross-section
//! at a fixed lag is then an iid sample from the kernel's t-step marginal, which is
//! compared with the quadrature CDF.

use imcmc_core::diagnostics::{ks_critical_99, ks_distance};
use imcmc_core::distributions::RngStream;
use imcmc_core::models::{quadrature_oracle, InterceptModel, PosteriorOracle};
use imcmc_core::samplers::{run_chain, HmcConfig, Init, KernelSpec, Model};

const CHAINS: usize = 1500;
const LAGS: [usize; 3] = [1, 10, 100];

fn cross_sections(kernel: &KernelSpec, model: &InterceptModel, oracle: &PosteriorOracle, seed: u64) -> Vec<Vec<f64>> {
    let mut init_rng = RngStream::new(seed, u64::MAX);
    let mut out = vec![Vec::with_capacity(CHAINS); LAGS.len()];
    for c in 0..CHAINS {
        let start = oracle.sample(&mut init_rng);
        let mut rng = RngStream::new(seed, c as u64);
        let t = run_chain(kernel, &Model::Intercept(*model), &Init::Point(vec![start]), LAGS[2], 0, &mut rng).unwrap();
        for (k, &lag) in LAGS.iter().enumerate() {
            out[k].push(t.sample(lag - 1)[0]);
        }
    }
    out
}

fn check(kernel: KernelSpec, model: InterceptModel, seed: u64) {
    let oracle = quadrature_oracle(&model).unwrap();
    let band = ks_critical_99(CHAINS);
    for (xs, lag) in cross_sections(&kernel, &model, &oracle, seed).iter().zip(LAGS) {
        let d = ks_distance(xs, |x| oracle.cdf(x));
        assert!(d < band, "{} at lag {lag}: KS {d:.4} >= {band:.4}", kernel.id());
    }
}

fn fixed_hmc() -> KernelSpec {
    // no warmup, so every transition uses the same kernel
    KernelSpec::Hmc {
        config: HmcConfig {
            steps: 8,
            warmup: 0,
            initial_step_size: Some(0.3),
            ..HmcConfig::default()
        },
    }
}

#[test]
fn pg_da_preserves_logit_posterior() {
    check(KernelSpec::from_name("pg_da").unwrap(), InterceptModel::logit(1, 100, 100.0).unwrap(), 1);
}

#[test]
fn ac_da_preserves_probit_posterior() {
    check(KernelSpec::from_name("ac_da").unwrap(), InterceptModel::probit(1, 100, 100.0).unwrap(), 2);
}

#[test]
fn metropolis_kernels_preserve_posterior() {
    for (i, name) in ["rwm", "rwm_uniform", "adaptive_metropolis"].into_iter().enumerate() {
        let k = KernelSpec::from_name(name).unwrap();
        check(k, InterceptModel::logit(1, 100, 100.0).unwrap(), 10 + i as u64);
        check(k, InterceptModel::probit(1, 100, 100.0).unwrap(), 20 + i as u64);
    }
}

#[test]
fn hmc_preserves_posterior() {
    check(fixed_hmc(), InterceptModel::logit(1, 100, 100.0).unwrap(), 3);
    check(fixed_hmc(), InterceptModel::probit(1, 100, 100.0).unwrap(), 4);
}

#[test]
fn balanced_data_is_preserved_too() {
    check(KernelSpec::from_name("pg_da").unwrap(), InterceptModel::logit(40, 100, 100.0).unwrap(), 5);
    check(KernelSpec::from_name("ac_da").unwrap(), InterceptModel::probit(40, 100, 100.0).unwrap(), 6);
}
