use std::time::Instant;

use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adaptive::adaptive_metropolis_step;
use super::data_augmentation::{ac_da_step, pg_da_regression_step, pg_da_step};
use super::hierarchical::{hier_hybrid_step, hier_pg_da_step, SigmaUpdate};
use super::hmc::{hmc_step, HmcConfig};
use super::metropolis::rwm_step;
use super::{KernelState, RwmProposal};
use crate::distributions::{PgSampler, RngStream};
use crate::error::{Error, Result};
use crate::models::{HierarchicalModel, InterceptModel, Link, RegressionModel};

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Intercept(InterceptModel),
    Hierarchical(HierarchicalModel),
    Regression(RegressionModel),
}

impl Model {
    pub fn id(&self) -> String {
        match self {
            Model::Intercept(m) => format!("intercept_{}_y{}_n{}", m.link(), m.y(), m.n()),
            Model::Hierarchical(m) => format!("hierarchical_N{}", m.num_sites()),
            Model::Regression(m) => format!("regression_N{}_p{}", m.num_rows(), m.num_coefficients()),
        }
    }

    /// Length of the sampled parameter vector.
    pub fn dim(&self) -> usize {
        match self {
            Model::Intercept(_) => 1,
            Model::Hierarchical(m) => m.num_sites() + 2,
            Model::Regression(m) => m.num_coefficients(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum KernelSpec {
    PgDa {
        #[serde(default)]
        pg: PgSampler,
    },
    AcDa,
    Rwm {
        proposal: RwmProposal,
    },
    AdaptiveMetropolis,
    HierHybrid {
        #[serde(default)]
        sigma_update: SigmaUpdate,
    },
    HierPgDa {
        #[serde(default)]
        pg: PgSampler,
        #[serde(default)]
        sigma_update: SigmaUpdate,
    },
    PgDaRegression {
        #[serde(default)]
        pg: PgSampler,
    },
    Hmc {
        #[serde(default)]
        config: HmcConfig,
    },
}

impl KernelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            KernelSpec::PgDa { .. } => "pg_da",
            KernelSpec::AcDa => "ac_da",
            KernelSpec::Rwm {
                proposal: RwmProposal::Gaussian { .. },
            } => "rwm_gaussian",
            KernelSpec::Rwm {
                proposal: RwmProposal::UniformLogN,
            } => "rwm_uniform",
            KernelSpec::AdaptiveMetropolis => "adaptive_metropolis",
            KernelSpec::HierHybrid { .. } => "hier_hybrid",
            KernelSpec::HierPgDa { .. } => "hier_pg_da",
            KernelSpec::PgDaRegression { .. } => "pg_da_regression",
            KernelSpec::Hmc { .. } => "hmc",
        }
    }

    /// Parses a kernel name with default settings; `rwm` means the unit Gaussian proposal.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "pg_da" => KernelSpec::PgDa { pg: PgSampler::default() },
            "ac_da" => KernelSpec::AcDa,
            "rwm" | "rwm_gaussian" => KernelSpec::Rwm {
                proposal: RwmProposal::Gaussian { scale: 1.0 },
            },
            "rwm_uniform" => KernelSpec::Rwm {
                proposal: RwmProposal::UniformLogN,
            },
            "adaptive_metropolis" => KernelSpec::AdaptiveMetropolis,
            "hier_hybrid" => KernelSpec::HierHybrid {
                sigma_update: SigmaUpdate::default(),
            },
            "hier_pg_da" => KernelSpec::HierPgDa {
                pg: PgSampler::default(),
                sigma_update: SigmaUpdate::default(),
            },
            "pg_da_regression" => KernelSpec::PgDaRegression { pg: PgSampler::default() },
            "hmc" => KernelSpec::Hmc {
                config: HmcConfig::default(),
            },
            other => return Err(Error::config(format!("unknown kernel {other:?}"))),
        })
    }

    fn check(&self, model: &Model) -> Result<()> {
        let ok = match (self, model) {
            (KernelSpec::PgDa { .. }, Model::Intercept(m)) => m.link() == Link::Logit,
            (KernelSpec::AcDa, Model::Intercept(m)) => m.link() == Link::Probit,
            (KernelSpec::Rwm { .. } | KernelSpec::AdaptiveMetropolis, Model::Intercept(_)) => true,
            (KernelSpec::HierHybrid { .. } | KernelSpec::HierPgDa { .. }, Model::Hierarchical(_)) => true,
            (KernelSpec::PgDaRegression { .. }, Model::Regression(_)) => true,
            (KernelSpec::Hmc { .. }, Model::Intercept(_) | Model::Regression(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("kernel {} cannot sample model {}", self.id(), model.id())))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Init {
    Point(Vec<f64>),
    /// A distribution close to the posterior: for the intercept model a uniform on the
    /// warm-start interval, the mode for regression, and empirical logits for sites.
    WarmStart,
    Prior,
}

/// Post-burn-in output of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub kernel_id: String,
    pub model_id: String,
    pub seed: u64,
    pub stream_id: u64,
    /// Parameters per sample.
    pub dim: usize,
    /// Row-major `len × dim` values.
    pub samples: Vec<f64>,
    /// One flag per retained iteration for kernels that make a single Metropolis decision.
    pub accept_flags: Option<Vec<bool>>,
    /// Per-component acceptance rates of componentwise kernels, over the whole run.
    pub component_acceptance: Option<Vec<f64>>,
    pub wall_time: f64,
    /// Cost units over all iterations, burn-in included.
    pub cost_units: u64,
    pub divergences: u64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.samples.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Series of parameter `j`.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.samples.iter().skip(j).step_by(self.dim).copied().collect()
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.samples[t * self.dim..(t + 1) * self.dim]
    }

    pub fn accept_rate(&self) -> Option<f64> {
        self.accept_flags
            .as_ref()
            .filter(|f| !f.is_empty())
            .map(|f| f.iter().filter(|&&a| a).count() as f64 / f.len() as f64)
    }
}

fn initial_point(model: &Model, init: &Init, rng: &mut RngStream) -> Result<Vec<f64>> {
    let normal = |rng: &mut RngStream| -> f64 { StandardNormal.sample(rng) };
    let point = match (init, model) {
        (Init::Point(v), _) => {
            if v.len() != model.dim() {
                return Err(Error::config(format!(
                    "initial point has {} values, model {} needs {}",
                    v.len(),
                    model.id(),
                    model.dim()
                )));
            }
            v.clone()
        }
        (Init::WarmStart, Model::Intercept(m)) => {
            let (lo, hi) = m.warm_start_interval();
            vec![lo + (hi - lo) * rng.open01()]
        }
        (Init::WarmStart, Model::Regression(m)) => m.find_mode()?,
        (Init::WarmStart, Model::Hierarchical(m)) => {
            let mut v: Vec<f64> = m
                .sites()
                .iter()
                .map(|s| ((s.y as f64 + 0.5) / (s.n as f64 - s.y as f64 + 0.5)).ln())
                .collect();
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k;
            let sd = (v.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / k).sqrt();
            v.push(mean);
            v.push(sd.max(0.1));
            v
        }
        (Init::Prior, Model::Intercept(m)) => vec![m.prior_mean() + m.prior_var().sqrt() * normal(rng)],
        (Init::Prior, Model::Regression(m)) => {
            let s = m.prior_var().sqrt();
            (0..m.num_coefficients()).map(|_| s * normal(rng)).collect()
        }
        (Init::Prior, Model::Hierarchical(m)) => {
            let theta0 = m.prior_mean() + m.prior_var().sqrt() * normal(rng);
            let cauchy = Cauchy::new(0.0, m.sigma_scale()).map_err(|e| Error::numeric(e.to_string()))?;
            let sigma = loop {
                let s: f64 = cauchy.sample(rng);
                let s = s.abs();
                if s > 0.0 && s.is_finite() {
                    break s;
                }
            };
            let mut v: Vec<f64> = (0..m.num_sites()).map(|_| theta0 + sigma * normal(rng)).collect();
            v.push(theta0);
            v.push(sigma);
            v
        }
    };
    if point.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("initial point is not finite"));
    }
    Ok(point)
}

/// Runs `total` iterations of `kernel` on `model` and keeps the last `total − burn_in`.
///
/// Everything except `wall_time` is a deterministic function of the arguments and the
/// stream's `(seed, stream_id)`.
pub fn run_chain(
    kernel: &KernelSpec,
    model: &Model,
    init: &Init,
    total: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<Trace> {
    if total <= burn_in {
        return Err(Error::config(format!("T = {total} must exceed burn-in = {burn_in}")));
    }
    kernel.check(model)?;
    let started = Instant::now();
    let mut state = KernelState::new(initial_point(model, init, rng)?);
    let dim = model.dim();
    let kept = total - burn_in;
    let mut samples = Vec::with_capacity(kept * dim);
    let single_decision = matches!(
        kernel,
        KernelSpec::Rwm { .. } | KernelSpec::AdaptiveMetropolis | KernelSpec::Hmc { .. }
    );
    let mut flags = single_decision.then(|| Vec::with_capacity(kept));
    let mut cost = 0u64;

    for t in 0..total {
        let info = match (kernel, model) {
            (KernelSpec::PgDa { pg }, Model::Intercept(m)) => pg_da_step(&mut state, m, pg, rng)?,
            (KernelSpec::AcDa, Model::Intercept(m)) => ac_da_step(&mut state, m, rng)?,
            (KernelSpec::Rwm { proposal }, Model::Intercept(m)) => rwm_step(&mut state, m, *proposal, rng)?,
            (KernelSpec::AdaptiveMetropolis, Model::Intercept(m)) => adaptive_metropolis_step(&mut state, m, rng)?,
            (KernelSpec::HierHybrid { sigma_update }, Model::Hierarchical(m)) => {
                hier_hybrid_step(&mut state, m, *sigma_update, rng)?
            }
            (KernelSpec::HierPgDa { pg, sigma_update }, Model::Hierarchical(m)) => {
                hier_pg_da_step(&mut state, m, pg, *sigma_update, rng)?
            }
            (KernelSpec::PgDaRegression { pg }, Model::Regression(m)) => pg_da_regression_step(&mut state, m, pg, rng)?,
            (KernelSpec::Hmc { config }, Model::Intercept(m)) => hmc_step(&mut state, m, config, 1, rng)?,
            (KernelSpec::Hmc { config }, Model::Regression(m)) => {
                hmc_step(&mut state, m, config, m.num_rows() as u64, rng)?
            }
            _ => unreachable!("checked above"),
        };
        cost += info.cost;
        if t >= burn_in {
            samples.extend_from_slice(&state.params);
            if let (Some(f), Some(a)) = (flags.as_mut(), info.accepted) {
                f.push(a);
            }
        }
    }

    let component_acceptance = state
        .adapt
        .as_ref()
        .filter(|_| matches!(kernel, KernelSpec::HierHybrid { .. }))
        .map(|stats| stats.iter().map(|s| s.acceptance_rate().unwrap_or(0.0)).collect());
    Ok(Trace {
        kernel_id: kernel.id().to_string(),
        model_id: model.id(),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
        dim,
        samples,
        accept_flags: flags,
        component_acceptance,
        wall_time: started.elapsed().as_secs_f64(),
        cost_units: cost,
        divergences: state.hmc.map_or(0, |h| h.divergences),
    })
}
