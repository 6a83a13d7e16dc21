use super::quadrature::adaptive_simpson;
use super::InterceptModel;
use crate::distributions::RngStream;
use crate::error::{Error, Result};

const PANELS: usize = 512;
/// Relative tolerance applied to every quadrature the oracle performs.
const REL_TOL: f64 = 1e-11;

/// Quadrature-based ground truth for a one-parameter posterior.
///
/// The density is integrated panel by panel over the support bracket; the cumulative
/// panel masses make `cdf` a single short quadrature and `quantile` a bracketed root find.
#[derive(Debug, Clone)]
pub struct PosteriorOracle {
    model: InterceptModel,
    lo: f64,
    hi: f64,
    /// log density at the mode, subtracted before exponentiating
    shift: f64,
    /// ∫ exp(log p - shift) over the bracket
    mass: f64,
    log_normalizer: f64,
    mean: f64,
    variance: f64,
    edges: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Builds the oracle for `model`, integrating over its support bracket.
pub fn quadrature_oracle(model: &InterceptModel) -> Result<PosteriorOracle> {
    PosteriorOracle::new(model)
}

impl PosteriorOracle {
    pub fn new(model: &InterceptModel) -> Result<Self> {
        let (lo, hi) = model.support_bracket();
        let mode = model.find_mode();
        let shift = model.log_density_unchecked(mode);
        let rel = |x: f64| (model.log_density_unchecked(x) - shift).exp();

        // Gaussian approximation of the mass, used only to scale absolute tolerances.
        let width = 1.0 / (-model.curvature(mode)).sqrt();
        let scale = (2.0 * std::f64::consts::PI).sqrt() * width;
        let tol = REL_TOL * scale / PANELS as f64;

        let h = (hi - lo) / PANELS as f64;
        let edges: Vec<f64> = (0..=PANELS).map(|i| lo + h * i as f64).collect();
        let mut cumulative = Vec::with_capacity(PANELS + 1);
        cumulative.push(0.0);
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            m0 += adaptive_simpson(&rel, a, b, tol)?;
            m1 += adaptive_simpson(&|x: f64| (x - mode) * rel(x), a, b, tol * width)?;
            m2 += adaptive_simpson(&|x: f64| (x - mode).powi(2) * rel(x), a, b, tol * width * width)?;
            cumulative.push(m0);
        }
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::numeric(format!("posterior mass not positive: {m0}")));
        }
        let centered_mean = m1 / m0;
        let variance = m2 / m0 - centered_mean * centered_mean;
        if !(variance > 0.0) {
            return Err(Error::numeric(format!("posterior variance not positive: {variance}")));
        }
        for c in cumulative.iter_mut() {
            *c /= m0;
        }
        Ok(Self {
            model: *model,
            lo,
            hi,
            shift,
            mass: m0,
            log_normalizer: shift + m0.ln(),
            mean: mode + centered_mean,
            variance,
            edges,
            cumulative,
        })
    }

    pub fn model(&self) -> &InterceptModel {
        &self.model
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Log of the integral of the unnormalized posterior returned by `log_posterior`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return 0.0;
        }
        (self.model.log_density_unchecked(x) - self.shift).exp() / self.mass
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.model.log_density_unchecked(x) - self.log_normalizer
    }

    /// Posterior distribution function; 0 below and 1 above the bracket.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let h = (self.hi - self.lo) / PANELS as f64;
        let i = (((x - self.lo) / h) as usize).min(PANELS - 1);
        let a = self.edges[i];
        let partial = self.partial_mass(a, x);
        (self.cumulative[i] + partial).clamp(0.0, 1.0)
    }

    fn partial_mass(&self, a: f64, x: f64) -> f64 {
        if x <= a {
            return 0.0;
        }
        let f = |t: f64| self.pdf(t);
        // A sub-panel integral of a smooth density: the fallback Simpson rule is
        // already far more accurate than any use of the result needs.
        adaptive_simpson(&f, a, x, 1e-14)
            .unwrap_or_else(|_| super::quadrature::composite_simpson(&f, a, x, 64))
    }

    /// Inverse of `cdf` for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile needs p in (0, 1), got {p}")));
        }
        let i = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&p).expect("cumulative masses are finite"))
        {
            Ok(i) => return Ok(self.edges[i]),
            Err(i) => i.clamp(1, PANELS) - 1,
        };
        let (mut a, mut b) = (self.edges[i], self.edges[i + 1]);
        let target = p - self.cumulative[i];
        let base = self.edges[i];
        let g = |x: f64| self.partial_mass(base, x) - target;
        // Start from linear interpolation within the panel.
        let span = self.cumulative[i + 1] - self.cumulative[i];
        let mut x = if span > 0.0 {
            a + (b - a) * (target / span).clamp(0.0, 1.0)
        } else {
            0.5 * (a + b)
        };
        for _ in 0..100 {
            let gx = g(x);
            if gx > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = self.pdf(x);
            let newton = if d > 0.0 { x - gx / d } else { f64::NAN };
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - x).abs() <= 1e-14 * x.abs().max(1.0) || b - a <= 1e-14 * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Independent draw by inversion.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.open01();
        self.quantile(u).unwrap_or(if u < 0.5 { self.lo } else { self.hi })
    }
}
