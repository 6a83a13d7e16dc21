use rand_distr::{Distribution, StandardNormal};

use super::{KernelState, RwmProposal, StepInfo};
use crate::distributions::RngStream;
use crate::error::Result;
use crate::models::InterceptModel;

/// `min(1, p(to)/p(from))`, evaluated in the log domain.
pub fn acceptance_probability(model: &InterceptModel, from: f64, to: f64) -> Result<f64> {
    let log_ratio = model.log_posterior(to)? - model.log_posterior(from)?;
    Ok(log_ratio.min(0.0).exp())
}

/// One random-walk Metropolis step on the intercept model.
pub fn rwm_step(
    state: &mut KernelState,
    model: &InterceptModel,
    proposal: RwmProposal,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let theta = state.params[0];
    let cand = match proposal {
        RwmProposal::Gaussian { scale } => {
            let z: f64 = StandardNormal.sample(rng);
            theta + scale * z
        }
        RwmProposal::UniformLogN => {
            let h = proposal.half_width(model.n())?;
            theta + h * (2.0 * rng.open01() - 1.0)
        }
    };
    let log_ratio = model.log_posterior(cand)? - model.log_posterior(theta)?;
    let accepted = log_ratio >= 0.0 || rng.open01().ln() < log_ratio;
    if accepted {
        state.params[0] = cand;
    }
    Ok(StepInfo {
        accepted: Some(accepted),
        cost: 1,
    })
}
