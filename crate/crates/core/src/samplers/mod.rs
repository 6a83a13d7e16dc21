//! Markov transition kernels and the chain runner.
//!
//! Every step function mutates a [`KernelState`] in place and reports whether a
//! Metropolis move was accepted together with the cost units it consumed. Cost units
//! count likelihood terms touched: `n` for a data-augmentation sweep of the intercept
//! model, `Σ n_i` for the regression sweep, and one per density evaluation for the
//! Metropolis kernels.

mod adaptive;
mod chain;
mod data_augmentation;
mod hierarchical;
mod hmc;
mod metropolis;

use serde::{Deserialize, Serialize};

pub use adaptive::{adaptive_metropolis_step, ComponentStats, ADAPT_AFTER_ACCEPTS, PROPOSAL_FLOOR, PROPOSAL_SCALE};
pub use chain::{run_chain, Init, KernelSpec, Model, Trace};
pub use data_augmentation::{ac_da_step, ac_latent_sum, pg_conditional_draw, pg_da_regression_step, pg_da_step};
pub use hierarchical::{hier_hybrid_step, hier_pg_da_step, sample_sigma, sample_theta0, SigmaUpdate};
pub use hmc::{find_reasonable_step_size, hmc_step, leapfrog, HmcAdaptation, HmcConfig};
pub use metropolis::{acceptance_probability, rwm_step};

use crate::error::{Error, Result};

/// Proposal of the one-dimensional random-walk Metropolis kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RwmProposal {
    /// `θ' = θ + scale · N(0, 1)`.
    Gaussian { scale: f64 },
    /// `θ' ~ Uniform(θ − log n, θ + log n)`.
    UniformLogN,
}

impl RwmProposal {
    /// Half-width of the uniform proposal for `n` trials.
    pub fn half_width(&self, n: u64) -> Result<f64> {
        if n < 2 {
            return Err(Error::config("uniform log-n proposal needs n >= 2"));
        }
        Ok((n as f64).ln())
    }
}

/// Current parameters plus whatever a kernel carries between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelState {
    /// `θ`, `β`, or `(θ_1..θ_N, θ₀, σ)` for the hierarchical model.
    pub params: Vec<f64>,
    /// Per-component running statistics of the adaptive Metropolis kernels.
    pub adapt: Option<Vec<ComponentStats>>,
    pub hmc: Option<HmcAdaptation>,
    /// Latent draw of the last data-augmentation sweep (its sum for Albert–Chib);
    /// only stored when `keep_aux` is set.
    pub last_aux: Option<f64>,
    pub keep_aux: bool,
}

impl KernelState {
    pub fn new(params: Vec<f64>) -> Self {
        Self {
            params,
            adapt: None,
            hmc: None,
            last_aux: None,
            keep_aux: false,
        }
    }

    pub fn scalar(theta: f64) -> Self {
        Self::new(vec![theta])
    }

    pub fn with_aux(mut self) -> Self {
        self.keep_aux = true;
        self
    }
}

/// What one transition did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepInfo {
    /// Accept flag of a single Metropolis decision, `None` for Gibbs-type moves.
    pub accepted: Option<bool>,
    pub cost: u64,
}
