use nalgebra::{DMatrix, DVector};

use super::{log_sigmoid, sigmoid, LogDensity};
use crate::error::{Error, Result};

/// Binomial logistic regression `y_i ~ Binom(n_i, logit⁻¹(x_i β))` with `β ~ N(0, B·I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    x: DMatrix<f64>,
    y: Vec<u64>,
    n: Vec<u64>,
    prior_var: f64,
}

impl RegressionModel {
    pub fn new(x: DMatrix<f64>, y: Vec<u64>, n: Vec<u64>, prior_var: f64) -> Result<Self> {
        if x.nrows() != y.len() || y.len() != n.len() {
            return Err(Error::domain(format!(
                "design has {} rows but {} successes and {} trial counts",
                x.nrows(),
                y.len(),
                n.len()
            )));
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::domain("design matrix is empty"));
        }
        if let Some(i) = (0..y.len()).find(|&i| y[i] > n[i]) {
            return Err(Error::domain(format!("row {i}: y = {} exceeds n = {}", y[i], n[i])));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("design matrix has non-finite entries"));
        }
        if !(prior_var > 0.0 && prior_var.is_finite()) {
            return Err(Error::domain(format!("prior variance must be positive, got {prior_var}")));
        }
        Ok(Self { x, y, n, prior_var })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn successes(&self) -> &[u64] {
        &self.y
    }

    pub fn trials(&self) -> &[u64] {
        &self.n
    }

    pub fn prior_var(&self) -> f64 {
        self.prior_var
    }

    pub fn num_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn num_coefficients(&self) -> usize {
        self.x.ncols()
    }

    pub fn total_trials(&self) -> u64 {
        self.n.iter().sum()
    }

    fn check(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.x.ncols() {
            return Err(Error::domain(format!(
                "expected {} coefficients, got {}",
                self.x.ncols(),
                beta.len()
            )));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(())
    }

    /// Unnormalized log posterior at `beta`.
    pub fn log_posterior(&self, beta: &[f64]) -> Result<f64> {
        self.check(beta)?;
        let eta = &self.x * DVector::from_column_slice(beta);
        let mut lp = 0.0;
        for (i, &e) in eta.iter().enumerate() {
            if self.y[i] > 0 {
                lp += self.y[i] as f64 * log_sigmoid(e);
            }
            if self.y[i] < self.n[i] {
                lp += (self.n[i] - self.y[i]) as f64 * log_sigmoid(-e);
            }
        }
        let ssq: f64 = beta.iter().map(|b| b * b).sum();
        Ok(lp - 0.5 * ssq / self.prior_var)
    }

    /// Gradient `Xᵀ(y − n·logit⁻¹(Xβ)) − β/B`.
    pub fn log_posterior_grad(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check(beta)?;
        let b = DVector::from_column_slice(beta);
        let eta = &self.x * &b;
        let resid = DVector::from_iterator(
            eta.len(),
            eta.iter()
                .enumerate()
                .map(|(i, &e)| self.y[i] as f64 - self.n[i] as f64 * sigmoid(e)),
        );
        let g = self.x.tr_mul(&resid) - b / self.prior_var;
        Ok(g.iter().copied().collect())
    }

    /// Posterior mode by damped Newton iterations from zero.
    pub fn find_mode(&self) -> Result<Vec<f64>> {
        let p = self.x.ncols();
        let mut beta = DVector::zeros(p);
        let mut lp = self.log_posterior(beta.as_slice())?;
        for _ in 0..200 {
            let eta = &self.x * &beta;
            let mut w = DVector::zeros(eta.len());
            let mut resid = DVector::zeros(eta.len());
            for (i, &e) in eta.iter().enumerate() {
                let s = sigmoid(e);
                w[i] = self.n[i] as f64 * s * (1.0 - s);
                resid[i] = self.y[i] as f64 - self.n[i] as f64 * s;
            }
            let grad = self.x.tr_mul(&resid) - &beta / self.prior_var;
            let mut h = self.x.tr_mul(&DMatrix::from_diagonal(&w)) * &self.x;
            for k in 0..p {
                h[(k, k)] += 1.0 / self.prior_var;
            }
            let chol = h
                .cholesky()
                .ok_or_else(|| Error::numeric("negative Hessian is not positive definite"))?;
            let step = chol.solve(&grad);
            let mut t = 1.0;
            // Close to the mode the log density cannot resolve the improvement of a
            // Newton step, so take it without a line search.
            let small = step.amax() < 1e-4;
            loop {
                let cand = &beta + &step * t;
                let lp_new = self.log_posterior(cand.as_slice())?;
                if small || lp_new >= lp || t < 1e-10 {
                    beta = cand;
                    lp = lp_new;
                    break;
                }
                t *= 0.5;
            }
            if (&step * t).amax() < 1e-12 * beta.amax().max(1.0) {
                break;
            }
        }
        Ok(beta.iter().copied().collect())
    }
}

impl LogDensity for RegressionModel {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        self.log_posterior(x)
    }

    fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        self.check(x)?;
        let b = DVector::from_column_slice(x);
        let eta = &self.x * &b;
        let mut lp = 0.0;
        let mut resid = DVector::zeros(eta.len());
        for (i, &e) in eta.iter().enumerate() {
            let (y, n) = (self.y[i], self.n[i]);
            if y > 0 {
                lp += y as f64 * log_sigmoid(e);
            }
            if y < n {
                lp += (n - y) as f64 * log_sigmoid(-e);
            }
            resid[i] = y as f64 - n as f64 * sigmoid(e);
        }
        let g = self.x.tr_mul(&resid) - &b / self.prior_var;
        grad.copy_from_slice(g.as_slice());
        Ok(lp - 0.5 * b.norm_squared() / self.prior_var)
    }
}
