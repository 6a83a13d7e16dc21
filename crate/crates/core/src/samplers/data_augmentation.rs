use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::{KernelState, StepInfo};
use crate::distributions::{PgParams, PgSampler, RngStream, TruncatedNormal};
use crate::error::{Error, Result};
use crate::models::{InterceptModel, Link, RegressionModel};

fn require_link(model: &InterceptModel, link: Link, kernel: &str) -> Result<()> {
    if model.link() != link {
        return Err(Error::config(format!("{kernel} needs the {link} link, model uses {}", model.link())));
    }
    Ok(())
}

fn normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

/// One Pólya-Gamma sweep: `ω ~ PG(n, θ)`, then `θ ~ N(V(y − n/2 + b/B), V)` with
/// `V = (ω + 1/B)⁻¹`.
pub fn pg_da_step(
    state: &mut KernelState,
    model: &InterceptModel,
    pg: &PgSampler,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    require_link(model, Link::Logit, "pg_da")?;
    let theta = state.params[0];
    let omega = pg.sample(PgParams::new(model.n(), theta)?, rng)?;
    state.params[0] = pg_conditional_draw(model, omega, rng);
    if state.keep_aux {
        state.last_aux = Some(omega);
    }
    Ok(StepInfo {
        accepted: None,
        cost: model.n(),
    })
}

/// `θ | ω` for the logit intercept model.
pub fn pg_conditional_draw(model: &InterceptModel, omega: f64, rng: &mut RngStream) -> f64 {
    let alpha = model.y() as f64 - 0.5 * model.n() as f64;
    let precision = omega + 1.0 / model.prior_var();
    let var = 1.0 / precision;
    let mean = var * (alpha + model.prior_mean() / model.prior_var());
    mean + var.sqrt() * normal(rng)
}

/// One Albert–Chib sweep: `y` utilities from `TN(θ, 1; 0, ∞)` and `n − y` from
/// `TN(θ, 1; −∞, 0)`, summed into `ω`, then `θ ~ N(V(ω + b/B), V)` with `V = (n + 1/B)⁻¹`.
pub fn ac_da_step(state: &mut KernelState, model: &InterceptModel, rng: &mut RngStream) -> Result<StepInfo> {
    require_link(model, Link::Probit, "ac_da")?;
    let theta = state.params[0];
    let omega = ac_latent_sum(model, theta, rng)?;
    let var = 1.0 / (model.n() as f64 + 1.0 / model.prior_var());
    let mean = var * (omega + model.prior_mean() / model.prior_var());
    state.params[0] = mean + var.sqrt() * normal(rng);
    if state.keep_aux {
        state.last_aux = Some(omega);
    }
    Ok(StepInfo {
        accepted: None,
        cost: model.n(),
    })
}

/// Sum of the latent utilities drawn at `theta`.
pub fn ac_latent_sum(model: &InterceptModel, theta: f64, rng: &mut RngStream) -> Result<f64> {
    let mut omega = 0.0;
    if model.y() > 0 {
        let pos = TruncatedNormal::new(theta, 1.0, 0.0, f64::INFINITY)?;
        for _ in 0..model.y() {
            omega += pos.try_sample(rng)?;
        }
    }
    let failures = model.n() - model.y();
    if failures > 0 {
        let neg = TruncatedNormal::new(theta, 1.0, f64::NEG_INFINITY, 0.0)?;
        for _ in 0..failures {
            omega += neg.try_sample(rng)?;
        }
    }
    Ok(omega)
}

/// One Pólya-Gamma sweep for logistic regression: `ω_i ~ PG(n_i, x_iβ)`, then
/// `β ~ N(V Xᵀκ, V)` with `V = (XᵀΩX + I/B)⁻¹` and `κ_i = y_i − n_i/2`.
pub fn pg_da_regression_step(
    state: &mut KernelState,
    model: &RegressionModel,
    pg: &PgSampler,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let x = model.design();
    let (rows, p) = (x.nrows(), x.ncols());
    let beta = DVector::from_column_slice(&state.params);
    let eta = x * &beta;
    let mut omega = DVector::zeros(rows);
    let mut kappa = DVector::zeros(rows);
    for i in 0..rows {
        let n = model.trials()[i];
        omega[i] = if n == 0 { 0.0 } else { pg.sample(PgParams::new(n, eta[i])?, rng)? };
        kappa[i] = model.successes()[i] as f64 - 0.5 * n as f64;
    }
    // XᵀΩX, accumulated row by row to avoid forming Ω
    let mut precision = DMatrix::zeros(p, p);
    for i in 0..rows {
        let row = x.row(i);
        precision.syger(omega[i], &row.transpose(), &row.transpose(), 1.0);
    }
    precision.fill_upper_triangle_with_lower_triangle();
    for k in 0..p {
        precision[(k, k)] += 1.0 / model.prior_var();
    }
    let chol = precision
        .cholesky()
        .ok_or_else(|| Error::numeric("posterior precision XᵀΩX + I/B is not positive definite"))?;
    let mean = chol.solve(&x.tr_mul(&kappa));
    // L Lᵀ = V⁻¹, so L⁻ᵀ z has covariance V
    let z = DVector::from_iterator(p, (0..p).map(|_| normal(rng)));
    let noise = chol
        .l()
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or_else(|| Error::numeric("triangular solve failed"))?;
    let draw = mean + noise;
    state.params.copy_from_slice(draw.as_slice());
    if state.keep_aux {
        state.last_aux = Some(omega.sum());
    }
    Ok(StepInfo {
        accepted: None,
        cost: model.total_trials(),
    })
}
