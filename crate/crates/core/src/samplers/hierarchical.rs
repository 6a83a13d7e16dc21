use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use super::adaptive::ComponentStats;
use super::{KernelState, StepInfo};
use crate::distributions::{PgParams, PgSampler, RngStream};
use crate::error::{Error, Result};
use crate::models::HierarchicalModel;

/// How the scale `σ` is refreshed at the end of a hierarchical sweep.
///
/// Both variants slice on the half-Cauchy factor `1/(1 + A²η)`, `η = σ⁻²`, then draw `η`
/// below the slice bound `(1 − u)/(uA²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaUpdate {
    /// `η ~ Gamma((N + 1)/2, rate S/2)` below the bound, the exact full conditional.
    #[default]
    GammaSlice,
    /// `η ~ Exponential(rate S/2)` below the bound. Coincides with `GammaSlice` when
    /// `N = 1`; for larger `N` it does not target the posterior.
    Exponential,
}

fn normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

fn split(state: &KernelState, n: usize) -> Result<(f64, f64)> {
    if state.params.len() != n + 2 {
        return Err(Error::config(format!(
            "hierarchical state needs {} values, got {}",
            n + 2,
            state.params.len()
        )));
    }
    let sigma = state.params[n + 1];
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::numeric(format!("sigma left the positive reals: {sigma}")));
    }
    Ok((state.params[n], sigma))
}

/// Gibbs draw of `θ₀ ~ N(s·m, s)`, `s = (N/σ² + 1/B)⁻¹`, `m = Σθ_i/σ² + b/B`.
pub fn sample_theta0(model: &HierarchicalModel, theta: &[f64], sigma: f64, rng: &mut RngStream) -> f64 {
    let inv_var = 1.0 / (sigma * sigma);
    let s = 1.0 / (theta.len() as f64 * inv_var + 1.0 / model.prior_var());
    let m = theta.iter().sum::<f64>() * inv_var + model.prior_mean() / model.prior_var();
    s * m + s.sqrt() * normal(rng)
}

/// Slice update of `σ` given the site effects and `θ₀`.
pub fn sample_sigma(
    model: &HierarchicalModel,
    theta: &[f64],
    theta0: f64,
    sigma: f64,
    update: SigmaUpdate,
    rng: &mut RngStream,
) -> Result<f64> {
    let a2 = model.sigma_scale().powi(2);
    let eta = 1.0 / (sigma * sigma);
    let u = rng.open01() / (1.0 + a2 * eta);
    let bound = (1.0 - u) / (u * a2);
    let ssq: f64 = theta.iter().map(|t| (t - theta0).powi(2)).sum();
    let rate = 0.5 * ssq;
    let shape = match update {
        SigmaUpdate::GammaSlice => 0.5 * (theta.len() as f64 + 1.0),
        SigmaUpdate::Exponential => 1.0,
    };
    let new_eta = truncated_gamma(shape, rate, bound, rng)?;
    if !(new_eta > 0.0) || !new_eta.is_finite() {
        return Err(Error::numeric(format!("sigma slice produced eta = {new_eta}")));
    }
    Ok(new_eta.sqrt().recip())
}

/// Draw from `Gamma(shape, rate)` restricted to `(0, bound)`.
///
/// A vanishing rate leaves the power law `η^(shape−1)` on the interval, sampled exactly.
fn truncated_gamma(shape: f64, rate: f64, bound: f64, rng: &mut RngStream) -> Result<f64> {
    if rate * bound < 1e-12 {
        return Ok(bound * rng.open01().powf(1.0 / shape));
    }
    if shape == 1.0 {
        // inverse cdf of the truncated exponential
        let e = -(rng.open01() * (-rate * bound).exp_m1()).ln_1p() / rate;
        return Ok(e.min(bound));
    }
    let dist = Gamma::new(shape, rate).map_err(|e| Error::numeric(e.to_string()))?;
    let mass = dist.cdf(bound);
    if mass >= 0.25 {
        let g = GammaDist::new(shape, 1.0 / rate).map_err(|e| Error::numeric(e.to_string()))?;
        for _ in 0..1_000_000 {
            let x = g.sample(rng);
            if x < bound {
                return Ok(x);
            }
        }
        return Err(Error::numeric("truncated gamma rejection loop did not terminate"));
    }
    if mass > 1e-300 {
        let x = dist.inverse_cdf(rng.open01() * mass);
        if x > 0.0 && x < bound {
            return Ok(x);
        }
    }
    // The bound sits far below the mode, so the log density is concave and increasing on
    // (0, bound): its tangent at the bound gives an exponential envelope for rejection.
    let log_f = |x: f64| (shape - 1.0) * x.ln() - rate * x;
    let slope = (shape - 1.0) / bound - rate;
    if !(slope > 0.0) {
        return Err(Error::numeric(format!(
            "truncated gamma: no envelope for shape {shape}, rate {rate}, bound {bound}"
        )));
    }
    for _ in 0..1_000_000 {
        let e = -(rng.open01() * (-slope * bound).exp_m1()).ln_1p() / slope;
        let x = bound - e;
        if x > 0.0 && rng.open01().ln() <= log_f(x) - log_f(bound) + slope * e {
            return Ok(x);
        }
    }
    Err(Error::numeric("truncated gamma tail rejection did not terminate"))
}

fn ensure_stats(state: &mut KernelState, n: usize) -> &mut Vec<ComponentStats> {
    let adapt = state.adapt.get_or_insert_with(Vec::new);
    if adapt.len() != n {
        *adapt = vec![ComponentStats::default(); n];
    }
    adapt
}

/// One sweep of the hybrid sampler: adaptive Metropolis on every `θ_i`, a Gibbs draw of
/// `θ₀`, then the slice update of `σ`.
///
/// The step reports the fraction of accepted site moves through `accepted` only when
/// there is exactly one site; per-site rates live in the adaptation statistics.
pub fn hier_hybrid_step(
    state: &mut KernelState,
    model: &HierarchicalModel,
    sigma_update: SigmaUpdate,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let n = model.num_sites();
    let (theta0, sigma) = split(state, n)?;
    let inv_var = 1.0 / (sigma * sigma);
    let mut stats = std::mem::take(ensure_stats(state, n));
    let mut cost = 0;
    let mut last_accept = false;
    for (i, st) in stats.iter_mut().enumerate() {
        let target = |t: f64| {
            let d = t - theta0;
            model.site_log_likelihood(i, t) - 0.5 * d * d * inv_var
        };
        let (next, acc) = st.update(state.params[i], target, rng);
        state.params[i] = next;
        last_accept = acc;
        cost += 1;
    }
    state.adapt = Some(stats);
    finish_sweep(state, model, sigma_update, rng)?;
    Ok(StepInfo {
        accepted: (n == 1).then_some(last_accept),
        cost,
    })
}

/// One sweep that updates every `θ_i` by its own Pólya-Gamma augmentation given `θ₀`
/// and `σ`, followed by the same `θ₀` and `σ` moves as the hybrid sampler.
pub fn hier_pg_da_step(
    state: &mut KernelState,
    model: &HierarchicalModel,
    pg: &PgSampler,
    sigma_update: SigmaUpdate,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let n = model.num_sites();
    let (theta0, sigma) = split(state, n)?;
    let inv_var = 1.0 / (sigma * sigma);
    let mut cost = 0;
    for (i, site) in model.sites().iter().enumerate() {
        let omega = if site.n == 0 {
            0.0
        } else {
            pg.sample(PgParams::new(site.n, state.params[i])?, rng)?
        };
        let kappa = site.y as f64 - 0.5 * site.n as f64;
        let v = 1.0 / (omega + inv_var);
        state.params[i] = v * (kappa + theta0 * inv_var) + v.sqrt() * normal(rng);
        cost += site.n;
    }
    finish_sweep(state, model, sigma_update, rng)?;
    Ok(StepInfo { accepted: None, cost })
}

fn finish_sweep(
    state: &mut KernelState,
    model: &HierarchicalModel,
    sigma_update: SigmaUpdate,
    rng: &mut RngStream,
) -> Result<()> {
    let n = model.num_sites();
    let sigma = state.params[n + 1];
    let theta0 = sample_theta0(model, &state.params[..n], sigma, rng);
    let sigma = sample_sigma(model, &state.params[..n], theta0, sigma, sigma_update, rng)?;
    state.params[n] = theta0;
    state.params[n + 1] = sigma;
    Ok(())
}
