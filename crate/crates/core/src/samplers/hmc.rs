use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{KernelState, StepInfo};
use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::models::LogDensity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HmcConfig {
    /// Leapfrog steps per trajectory.
    pub steps: usize,
    /// Iterations during which the step size is adapted.
    pub warmup: usize,
    pub target_accept: f64,
    /// Starting step size; found by the doubling heuristic when absent.
    pub initial_step_size: Option<f64>,
    /// Each trajectory uses `ε·U(1 − j, 1 + j)`; breaks resonance of the fixed length.
    pub step_jitter: f64,
}

impl Default for HmcConfig {
    fn default() -> Self {
        Self {
            steps: 32,
            warmup: 1000,
            target_accept: 0.65,
            initial_step_size: None,
            step_jitter: 0.2,
        }
    }
}

/// Step size and dual-averaging accumulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HmcAdaptation {
    pub step_size: f64,
    pub iteration: usize,
    pub divergences: u64,
    mu: f64,
    log_step_bar: f64,
    h_bar: f64,
}

impl HmcAdaptation {
    pub fn new(step_size: f64) -> Self {
        Self {
            step_size,
            iteration: 0,
            divergences: 0,
            mu: (10.0 * step_size).ln(),
            log_step_bar: 0.0,
            h_bar: 0.0,
        }
    }

    // Nesterov dual averaging with the usual constants γ = 0.05, t₀ = 10, κ = 0.75.
    fn adapt(&mut self, accept_prob: f64, target: f64, warmup: usize) {
        const GAMMA: f64 = 0.05;
        const T0: f64 = 10.0;
        const KAPPA: f64 = 0.75;
        self.iteration += 1;
        let m = self.iteration as f64;
        let w = 1.0 / (m + T0);
        self.h_bar = (1.0 - w) * self.h_bar + w * (target - accept_prob);
        let log_step = self.mu - m.sqrt() / GAMMA * self.h_bar;
        let eta = m.powf(-KAPPA);
        self.log_step_bar = eta * log_step + (1.0 - eta) * self.log_step_bar;
        self.step_size = if self.iteration >= warmup {
            self.log_step_bar.exp()
        } else {
            log_step.exp()
        };
    }
}

/// `steps` leapfrog steps from `(q, p)` with unit mass. Returns the final log density and
/// leaves its gradient in `grad`; `grad` must hold the gradient at the starting `q`.
pub fn leapfrog<D: LogDensity + ?Sized>(
    density: &D,
    q: &mut [f64],
    p: &mut [f64],
    grad: &mut [f64],
    step_size: f64,
    steps: usize,
) -> Result<f64> {
    let mut lp = f64::NAN;
    for _ in 0..steps {
        for (pi, gi) in p.iter_mut().zip(grad.iter()) {
            *pi += 0.5 * step_size * gi;
        }
        for (qi, pi) in q.iter_mut().zip(p.iter()) {
            *qi += step_size * pi;
        }
        lp = density.log_density_and_grad(q, grad)?;
        for (pi, gi) in p.iter_mut().zip(grad.iter()) {
            *pi += 0.5 * step_size * gi;
        }
    }
    Ok(lp)
}

fn kinetic(p: &[f64]) -> f64 {
    0.5 * p.iter().map(|v| v * v).sum::<f64>()
}

/// Doubles or halves a trial step size until one-step acceptance crosses 1/2.
pub fn find_reasonable_step_size<D: LogDensity + ?Sized>(
    density: &D,
    q0: &[f64],
    rng: &mut RngStream,
) -> Result<f64> {
    let d = q0.len();
    let mut grad0 = vec![0.0; d];
    let lp0 = density.log_density_and_grad(q0, &mut grad0)?;
    let mut eps = 1.0;
    let log_accept = |eps: f64, rng: &mut RngStream| -> f64 {
        let mut q = q0.to_vec();
        let mut p: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let h0 = kinetic(&p) - lp0;
        let mut g = grad0.clone();
        match leapfrog(density, &mut q, &mut p, &mut g, eps, 1) {
            Ok(lp) if lp.is_finite() => h0 - (kinetic(&p) - lp),
            _ => f64::NEG_INFINITY,
        }
    };
    let up = log_accept(eps, rng) > 0.5f64.ln();
    for _ in 0..100 {
        let la = log_accept(eps, rng);
        if up != (la > 0.5f64.ln()) {
            break;
        }
        eps = if up { eps * 2.0 } else { eps * 0.5 };
    }
    Ok(eps)
}

/// One HMC transition with dual-averaging adaptation of the step size during warmup.
///
/// A trajectory that leaves the domain of the density or reaches a non-finite energy is
/// rejected and counted as a divergence. `cost_per_gradient` is charged per leapfrog step.
pub fn hmc_step<D: LogDensity + ?Sized>(
    state: &mut KernelState,
    density: &D,
    config: &HmcConfig,
    cost_per_gradient: u64,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let d = density.dim();
    if state.params.len() != d {
        return Err(Error::config(format!("HMC state has {} values, density has dimension {d}", state.params.len())));
    }
    if !(0.0..1.0).contains(&config.step_jitter) {
        return Err(Error::config(format!("step jitter must lie in [0, 1), got {}", config.step_jitter)));
    }
    if state.hmc.is_none() {
        let eps = match config.initial_step_size {
            Some(e) => e,
            None => find_reasonable_step_size(density, &state.params, rng)?,
        };
        state.hmc = Some(HmcAdaptation::new(eps));
    }
    let adapt = state.hmc.as_mut().expect("initialized above");
    let step_size = if config.step_jitter > 0.0 {
        adapt.step_size * (1.0 + config.step_jitter * (2.0 * rng.open01() - 1.0))
    } else {
        adapt.step_size
    };

    let mut grad = vec![0.0; d];
    let lp0 = density.log_density_and_grad(&state.params, &mut grad)?;
    let mut q = state.params.clone();
    let mut p: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let h0 = kinetic(&p) - lp0;
    let lp1 = leapfrog(density, &mut q, &mut p, &mut grad, step_size, config.steps);
    let accept_prob = match lp1 {
        Ok(lp) if lp.is_finite() && q.iter().all(|v| v.is_finite()) => {
            let h1 = kinetic(&p) - lp;
            if h1.is_finite() {
                (h0 - h1).min(0.0).exp()
            } else {
                adapt.divergences += 1;
                0.0
            }
        }
        _ => {
            adapt.divergences += 1;
            0.0
        }
    };
    let accepted = accept_prob > 0.0 && rng.open01() < accept_prob;
    if accepted {
        state.params = q;
    }
    if adapt.iteration < config.warmup {
        adapt.adapt(accept_prob, config.target_accept, config.warmup);
    }
    Ok(StepInfo {
        accepted: Some(accepted),
        cost: config.steps as u64 * cost_per_gradient,
    })
}
