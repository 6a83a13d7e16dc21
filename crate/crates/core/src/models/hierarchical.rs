use serde::{Deserialize, Serialize};

use super::{log_sigmoid, sigmoid, LogDensity};
use crate::error::{Error, Result};

/// Counts at one site: `y` successes out of `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub y: u64,
    pub n: u64,
}

/// Binomial sites with logit-scale effects `θ_i ~ N(θ₀, σ²)`, `θ₀ ~ N(b, B)` and a
/// half-Cauchy prior with scale `A` on `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalModel {
    sites: Vec<Site>,
    prior_mean: f64,
    prior_var: f64,
    sigma_scale: f64,
}

impl HierarchicalModel {
    pub fn new(sites: Vec<Site>, prior_mean: f64, prior_var: f64, sigma_scale: f64) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::domain("hierarchical model needs at least one site"));
        }
        if let Some((i, s)) = sites.iter().enumerate().find(|(_, s)| s.y > s.n) {
            return Err(Error::domain(format!("site {i}: y = {} exceeds n = {}", s.y, s.n)));
        }
        if !(prior_var > 0.0 && prior_var.is_finite()) {
            return Err(Error::domain(format!("prior variance must be positive, got {prior_var}")));
        }
        if !(sigma_scale > 0.0 && sigma_scale.is_finite()) {
            return Err(Error::domain(format!("sigma prior scale must be positive, got {sigma_scale}")));
        }
        if !prior_mean.is_finite() {
            return Err(Error::domain("prior mean must be finite"));
        }
        Ok(Self {
            sites,
            prior_mean,
            prior_var,
            sigma_scale,
        })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn prior_var(&self) -> f64 {
        self.prior_var
    }

    pub fn sigma_scale(&self) -> f64 {
        self.sigma_scale
    }

    /// Binomial log likelihood of site `i` at logit `theta`.
    #[inline]
    pub fn site_log_likelihood(&self, i: usize, theta: f64) -> f64 {
        let s = self.sites[i];
        let mut l = 0.0;
        if s.y > 0 {
            l += s.y as f64 * log_sigmoid(theta);
        }
        if s.y < s.n {
            l += (s.n - s.y) as f64 * log_sigmoid(-theta);
        }
        l
    }

    /// Log full conditional of `θ_i` given `θ₀` and `σ`, up to a constant.
    #[inline]
    pub fn site_log_conditional(&self, i: usize, theta: f64, theta0: f64, sigma: f64) -> f64 {
        let d = theta - theta0;
        self.site_log_likelihood(i, theta) - 0.5 * d * d / (sigma * sigma)
    }

    /// Joint log posterior of `(θ_1..θ_N, θ₀, σ)` with respect to Lebesgue measure in `σ`.
    pub fn log_posterior(&self, theta: &[f64], theta0: f64, sigma: f64) -> Result<f64> {
        if theta.len() != self.sites.len() {
            return Err(Error::domain(format!(
                "expected {} site effects, got {}",
                self.sites.len(),
                theta.len()
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
        }
        if !theta0.is_finite() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("parameters must be finite"));
        }
        let n = self.sites.len() as f64;
        let mut lp = 0.0;
        for (i, &t) in theta.iter().enumerate() {
            lp += self.site_log_conditional(i, t, theta0, sigma);
        }
        lp -= n * sigma.ln();
        let d0 = theta0 - self.prior_mean;
        lp -= 0.5 * d0 * d0 / self.prior_var;
        lp -= (sigma * sigma / (self.sigma_scale * self.sigma_scale)).ln_1p();
        Ok(lp)
    }
}

/// Unconstrained parameterization `(θ_1..θ_N, θ₀, log σ)`, Jacobian included.
impl LogDensity for HierarchicalModel {
    fn dim(&self) -> usize {
        self.sites.len() + 2
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        let n = self.sites.len();
        let log_sigma = x[n + 1];
        Ok(self.log_posterior(&x[..n], x[n], log_sigma.exp())? + log_sigma)
    }

    fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let n = self.sites.len();
        let (theta0, log_sigma) = (x[n], x[n + 1]);
        let sigma = log_sigma.exp();
        let lp = self.log_posterior(&x[..n], theta0, sigma)? + log_sigma;
        let inv_var = 1.0 / (sigma * sigma);
        let mut g0 = -(theta0 - self.prior_mean) / self.prior_var;
        let mut ssq = 0.0;
        for (i, s) in self.sites.iter().enumerate() {
            let d = x[i] - theta0;
            grad[i] = s.y as f64 - s.n as f64 * sigmoid(x[i]) - d * inv_var;
            g0 += d * inv_var;
            ssq += d * d;
        }
        grad[n] = g0;
        let r = sigma * sigma / (self.sigma_scale * self.sigma_scale);
        grad[n + 1] = ssq * inv_var - n as f64 - 2.0 * r / (1.0 + r) + 1.0;
        Ok(lp)
    }
}
