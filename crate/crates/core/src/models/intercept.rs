use serde::{Deserialize, Serialize};

use super::{log_sigmoid, sigmoid, Link, LogDensity};
use crate::distributions::{normal_hazard_lower, normal_log_cdf, normal_quantile};
use crate::error::{Error, Result};

/// Binomial observation `y` out of `n` with a single logit- or probit-scale parameter and a
/// `Normal(prior_mean, prior_var)` prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptModel {
    y: u64,
    n: u64,
    link: Link,
    prior_mean: f64,
    prior_var: f64,
}

impl InterceptModel {
    pub fn new(y: u64, n: u64, link: Link, prior_mean: f64, prior_var: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("intercept model needs n >= 1"));
        }
        if y > n {
            return Err(Error::domain(format!("y = {y} exceeds n = {n}")));
        }
        if !(prior_var > 0.0) || !prior_var.is_finite() {
            return Err(Error::domain(format!(
                "prior variance must be positive and finite, got {prior_var}"
            )));
        }
        if !prior_mean.is_finite() {
            return Err(Error::domain("prior mean must be finite"));
        }
        Ok(Self {
            y,
            n,
            link,
            prior_mean,
            prior_var,
        })
    }

    pub fn logit(y: u64, n: u64, prior_var: f64) -> Result<Self> {
        Self::new(y, n, Link::Logit, 0.0, prior_var)
    }

    pub fn probit(y: u64, n: u64, prior_var: f64) -> Result<Self> {
        Self::new(y, n, Link::Probit, 0.0, prior_var)
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn prior_var(&self) -> f64 {
        self.prior_var
    }

    /// Log posterior without argument checks; constants independent of `theta` dropped.
    #[inline]
    pub(crate) fn log_density_unchecked(&self, theta: f64) -> f64 {
        let (y, f) = (self.y as f64, (self.n - self.y) as f64);
        let d = theta - self.prior_mean;
        let prior = -0.5 * d * d / self.prior_var;
        let lik = match self.link {
            // y·θ − n·log(1 + e^θ), written so that y = 0 or n − y = 0 drop out exactly
            Link::Logit => {
                let mut l = 0.0;
                if self.y > 0 {
                    l += y * log_sigmoid(theta);
                }
                if self.y < self.n {
                    l += f * log_sigmoid(-theta);
                }
                l
            }
            Link::Probit => {
                let mut l = 0.0;
                if self.y > 0 {
                    l += y * normal_log_cdf(theta);
                }
                if self.y < self.n {
                    l += f * normal_log_cdf(-theta);
                }
                l
            }
        };
        lik + prior
    }

    #[inline]
    pub(crate) fn grad_unchecked(&self, theta: f64) -> f64 {
        let prior = -(theta - self.prior_mean) / self.prior_var;
        match self.link {
            Link::Logit => self.y as f64 - self.n as f64 * sigmoid(theta) + prior,
            Link::Probit => {
                let (y, f) = (self.y as f64, (self.n - self.y) as f64);
                let mut g = prior;
                if self.y > 0 {
                    g += y * normal_hazard_lower(theta);
                }
                if self.y < self.n {
                    g -= f * normal_hazard_lower(-theta);
                }
                g
            }
        }
    }

    /// Second derivative of the log posterior; bounded above by `-1/prior_var`.
    pub(crate) fn curvature(&self, theta: f64) -> f64 {
        let prior = -1.0 / self.prior_var;
        match self.link {
            Link::Logit => {
                let s = sigmoid(theta);
                -(self.n as f64) * s * (1.0 - s) + prior
            }
            Link::Probit => {
                let (y, f) = (self.y as f64, (self.n - self.y) as f64);
                let mut c = prior;
                if self.y > 0 {
                    let h = normal_hazard_lower(theta);
                    c -= y * h * (theta + h);
                }
                if self.y < self.n {
                    let h = normal_hazard_lower(-theta);
                    c -= f * h * (h - theta);
                }
                c
            }
        }
    }

    /// Unnormalized log posterior at `theta`.
    ///
    /// Logit: `y·θ − n·log(1+e^θ) − (θ−b)²/2B`; probit: `y·logΦ(θ) + (n−y)·logΦ(−θ) − (θ−b)²/2B`.
    pub fn log_posterior(&self, theta: f64) -> Result<f64> {
        check_finite(theta)?;
        Ok(self.log_density_unchecked(theta))
    }

    pub fn log_posterior_grad(&self, theta: f64) -> Result<f64> {
        check_finite(theta)?;
        Ok(self.grad_unchecked(theta))
    }

    /// Link-scale value whose success probability is `p`.
    fn link_inverse(&self, p: f64) -> f64 {
        match self.link {
            Link::Logit => (p / (1.0 - p)).ln(),
            Link::Probit => normal_quantile(p).unwrap_or(0.0),
        }
    }

    /// The posterior mode: the unique root of the (strictly decreasing) gradient.
    ///
    /// Newton iterations from the link transform of `(y + 1/2)/(n + 1)`, safeguarded by
    /// bisection on a sign-change bracket.
    pub fn find_mode(&self) -> f64 {
        let start = self.link_inverse((self.y as f64 + 0.5) / (self.n as f64 + 1.0));
        let f = |t: f64| self.grad_unchecked(t);

        let mut step = 1.0;
        let mut lo = start - step;
        while f(lo) <= 0.0 {
            step *= 2.0;
            lo -= step;
        }
        step = 1.0;
        let mut hi = start + step;
        while f(hi) >= 0.0 {
            step *= 2.0;
            hi += step;
        }

        let mut x = start.clamp(lo, hi);
        for _ in 0..200 {
            let fx = f(x);
            if fx == 0.0 {
                return x;
            }
            if fx > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - fx / self.curvature(x);
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let moved = (next - x).abs();
            x = next;
            if moved <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        x
    }

    /// Interval holding all but a negligible fraction (< 1e-10) of the posterior mass.
    ///
    /// Starts at the mode ± 8 curvature widths and doubles each side until the
    /// log-concave tail bound `∫_h^∞ p ≤ p(h)/|∂ log p(h)|` certifies the tails.
    pub fn support_bracket(&self) -> (f64, f64) {
        let mode = self.find_mode();
        let lp_mode = self.log_density_unchecked(mode);
        let width = 1.0 / (-self.curvature(mode)).sqrt();
        let rel = |t: f64| (self.log_density_unchecked(t) - lp_mode).exp();

        let mut lo_dist = 8.0 * width;
        let mut hi_dist = 8.0 * width;
        for _ in 0..64 {
            let (lo, hi) = (mode - lo_dist, mode + hi_dist);
            let mass = super::quadrature::composite_simpson(&rel, lo, hi, 400);
            let tail_lo = rel(lo) / self.grad_unchecked(lo);
            let tail_hi = rel(hi) / -self.grad_unchecked(hi);
            let budget = 0.5e-10 * mass;
            let lo_ok = tail_lo < budget;
            let hi_ok = tail_hi < budget;
            if lo_ok && hi_ok {
                return (lo, hi);
            }
            if !lo_ok {
                lo_dist *= 2.0;
            }
            if !hi_ok {
                hi_dist *= 2.0;
            }
        }
        (mode - lo_dist, mode + hi_dist)
    }

    /// Uniform warm-start interval for the data-augmentation samplers.
    ///
    /// Logit: `θ̂ ± 1/log n`. Probit: `(Φ⁻¹((B+2)/(2(Bn+2))), Φ⁻¹(2(B+2)/(Bn+2)))`, which
    /// is only a proper interval when that upper probability is below one; otherwise
    /// (and for `n < 3`) the mode ± 1 is used.
    pub fn warm_start_interval(&self) -> (f64, f64) {
        let n = self.n as f64;
        match self.link {
            Link::Logit if self.n >= 3 => {
                let m = self.find_mode();
                let half = 1.0 / n.ln();
                (m - half, m + half)
            }
            Link::Probit if self.n >= 3 => {
                let b = self.prior_var;
                let p_lo = (b + 2.0) / (2.0 * (b * n + 2.0));
                let p_hi = 2.0 * (b + 2.0) / (b * n + 2.0);
                match (normal_quantile(p_lo), normal_quantile(p_hi)) {
                    (Ok(lo), Ok(hi)) if lo < hi => (lo, hi),
                    _ => {
                        let m = self.find_mode();
                        (m - 1.0, m + 1.0)
                    }
                }
            }
            _ => {
                let m = self.find_mode();
                (m - 1.0, m + 1.0)
            }
        }
    }
}

impl LogDensity for InterceptModel {
    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        self.log_posterior(x[0])
    }

    fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_finite(x[0])?;
        grad[0] = self.grad_unchecked(x[0]);
        Ok(self.log_density_unchecked(x[0]))
    }
}

fn check_finite(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("parameter must be finite, got {theta}")))
    }
}
