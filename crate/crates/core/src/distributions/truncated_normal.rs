use rand_distr::{Distribution, Exp1, StandardNormal};

use super::normal::{normal_cdf, normal_quantile};
use super::RngStream;
use crate::error::{Error, Result};

/// Standardized cutoff beyond which the exponential tail sampler takes over.
pub const TAIL_CUTOFF: f64 = 2.0;

const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    /// Plain normal draws, rejected outside the window. Used when the window holds
    /// most of the mass.
    Reject,
    /// Inverse cdf on a narrow central window.
    InverseCdf { p_lo: f64, p_hi: f64, flip: bool },
    /// Exponential rejection on `[a, b)` with `a > TAIL_CUTOFF`; `flip` mirrors a lower tail.
    ExpTail { flip: bool },
    /// Uniform rejection for short windows in the tail.
    UniformTail { flip: bool },
}

/// Normal distribution `N(mu, sigma²)` truncated to `(lo, hi)`.
///
/// The sampling strategy is chosen once at construction so repeated draws with fixed
/// parameters (the Albert–Chib latent step) cost a few nanoseconds each.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedNormal {
    mu: f64,
    sigma: f64,
    // standardized bounds, after mirroring when `flip` is set
    a: f64,
    b: f64,
    method: Method,
}

impl TruncatedNormal {
    pub fn new(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
            return Err(Error::domain(format!(
                "truncated normal needs finite mu and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        if !(lo < hi) {
            return Err(Error::domain(format!(
                "truncated normal needs lo < hi, got ({lo}, {hi})"
            )));
        }
        let a = (lo - mu) / sigma;
        let b = (hi - mu) / sigma;

        let (a, b, flip) = if b < -TAIL_CUTOFF { (-b, -a, true) } else { (a, b, false) };

        let method = if a > TAIL_CUTOFF {
            if b - a < 1.0 / a {
                Method::UniformTail { flip }
            } else {
                Method::ExpTail { flip }
            }
        } else {
            // Central window: a <= 2 and b >= -2.
            let (p_lo, p_hi) = (normal_cdf(a), normal_cdf(b));
            if p_hi - p_lo >= 0.3 {
                Method::Reject
            } else if a > 0.0 {
                // Work with upper-tail probabilities for precision.
                Method::InverseCdf {
                    p_lo: normal_cdf(-b),
                    p_hi: normal_cdf(-a),
                    flip: true,
                }
            } else {
                Method::InverseCdf {
                    p_lo,
                    p_hi,
                    flip: false,
                }
            }
        };
        Ok(Self {
            mu,
            sigma,
            a,
            b,
            method,
        })
    }

    pub fn try_sample(&self, rng: &mut RngStream) -> Result<f64> {
        let z = match self.method {
            Method::Reject => {
                let mut tries = 0;
                loop {
                    let z: f64 = StandardNormal.sample(rng);
                    if z > self.a && z < self.b {
                        break z;
                    }
                    tries += 1;
                    if tries > MAX_REJECTIONS {
                        return Err(self.too_many_rejections());
                    }
                }
            }
            Method::InverseCdf { p_lo, p_hi, flip } => {
                let p = p_lo + rng.open01() * (p_hi - p_lo);
                // p lies strictly inside (0, 1) because the window is central.
                let z = normal_quantile(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))?;
                let z = if flip { -z } else { z };
                z.clamp(self.a, self.b)
            }
            Method::ExpTail { flip } => {
                let a = self.a;
                let rate = 0.5 * (a + (a * a + 4.0).sqrt());
                let mut tries = 0;
                let z = loop {
                    let e: f64 = Exp1.sample(rng);
                    let z = a + e / rate;
                    let d = z - rate;
                    if z < self.b && rng.open01() <= (-0.5 * d * d).exp() {
                        break z;
                    }
                    tries += 1;
                    if tries > MAX_REJECTIONS {
                        return Err(self.too_many_rejections());
                    }
                };
                if flip {
                    -z
                } else {
                    z
                }
            }
            Method::UniformTail { flip } => {
                let (a, b) = (self.a, self.b);
                let mut tries = 0;
                let z = loop {
                    let z = a + rng.open01() * (b - a);
                    if rng.open01() <= (0.5 * (a * a - z * z)).exp() {
                        break z;
                    }
                    tries += 1;
                    if tries > MAX_REJECTIONS {
                        return Err(self.too_many_rejections());
                    }
                };
                if flip {
                    -z
                } else {
                    z
                }
            }
        };
        Ok(self.mu + self.sigma * z)
    }

    fn too_many_rejections(&self) -> Error {
        Error::numeric(format!(
            "truncated normal rejection loop exceeded {MAX_REJECTIONS} iterations (mu={}, sigma={})",
            self.mu, self.sigma
        ))
    }
}

/// One draw from `N(mu, sigma²)` truncated to `(lo, hi)`; either bound may be infinite.
pub fn sample_truncated_normal(
    mu: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    TruncatedNormal::new(mu, sigma, lo, hi)?.try_sample(rng)
}

/// Mean of the standard normal truncated to `(a, b)`.
#[cfg(test)]
pub(crate) fn truncated_standard_mean(a: f64, b: f64) -> f64 {
    use super::normal::{normal_log_cdf, normal_pdf};
    // (φ(a) - φ(b)) / (Φ(b) - Φ(a)), computed in the better-conditioned tail.
    if a > 0.0 {
        let mass = (normal_log_cdf(-a)).exp() - (normal_log_cdf(-b)).exp();
        (normal_pdf(a) - normal_pdf(b)) / mass
    } else {
        (normal_pdf(a) - normal_pdf(b)) / (normal_cdf(b) - normal_cdf(a))
    }
}
