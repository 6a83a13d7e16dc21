use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{KernelState, StepInfo};
use crate::distributions::RngStream;
use crate::error::Result;
use crate::models::InterceptModel;

/// Multiplier `s` of the empirical variance.
pub const PROPOSAL_SCALE: f64 = 2.4;
/// Smallest proposal variance, also used before adaptation starts.
pub const PROPOSAL_FLOOR: f64 = 0.1 * 0.1;
/// Accepted moves a component needs before its empirical variance is used.
pub const ADAPT_AFTER_ACCEPTS: u64 = 10;

/// Running mean and sum of squared deviations of one component's history.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentStats {
    /// Number of history values seen.
    pub k: u64,
    pub mean: f64,
    /// `Σ (θ_j − mean)²` over the history.
    pub ssq: f64,
    pub accepted: u64,
    pub proposed: u64,
}

impl ComponentStats {
    pub fn from_history(values: &[f64]) -> Self {
        let mut s = Self::default();
        for &v in values {
            s.push(v);
        }
        s
    }

    /// Welford update with the next history value.
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.k += 1;
        let d = x - self.mean;
        self.mean += d / self.k as f64;
        self.ssq += d * (x - self.mean);
    }

    /// `s/k · Σ (θ_j − θ̄)²`, without the floor; `None` for fewer than two values.
    pub fn empirical_variance(&self) -> Option<f64> {
        (self.k >= 2).then(|| PROPOSAL_SCALE * self.ssq / self.k as f64)
    }

    /// Proposal variance: the floor until adaptation starts, then the floored empirical value.
    #[inline]
    pub fn proposal_variance(&self) -> f64 {
        if self.accepted < ADAPT_AFTER_ACCEPTS {
            return PROPOSAL_FLOOR;
        }
        self.empirical_variance().map_or(PROPOSAL_FLOOR, |v| v.max(PROPOSAL_FLOOR))
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }

    /// Proposes from `N(current, proposal_variance)`, accepts by `log_target`, and records
    /// the resulting value in the history.
    #[inline]
    pub(crate) fn update<F: Fn(f64) -> f64>(&mut self, current: f64, log_target: F, rng: &mut RngStream) -> (f64, bool) {
        let z: f64 = StandardNormal.sample(rng);
        let cand = current + self.proposal_variance().sqrt() * z;
        let log_ratio = log_target(cand) - log_target(current);
        let accepted = log_ratio >= 0.0 || rng.open01().ln() < log_ratio;
        let next = if accepted { cand } else { current };
        self.proposed += 1;
        if accepted {
            self.accepted += 1;
        }
        self.push(next);
        (next, accepted)
    }
}

/// Adaptive Metropolis step on the intercept model (a single adapted component).
pub fn adaptive_metropolis_step(
    state: &mut KernelState,
    model: &InterceptModel,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    crate::models::LogDensity::log_density(model, &state.params)?;
    let stats = &mut state.adapt.get_or_insert_with(|| vec![ComponentStats::default()])[0];
    let (next, accepted) = stats.update(state.params[0], |t| model.log_density_unchecked(t), rng);
    state.params[0] = next;
    Ok(StepInfo {
        accepted: Some(accepted),
        cost: 1,
    })
}
