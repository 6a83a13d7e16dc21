use nalgebra::{DMatrix, SymmetricEigen};

use crate::distributions::normal_pdf;
use crate::error::{Error, Result};
use crate::models::InterceptModel;
use crate::samplers::RwmProposal;

/// A reversible transition matrix on a finite state space with its stationary law.
#[derive(Debug, Clone)]
pub struct DiscreteKernel {
    points: Vec<f64>,
    pi: Vec<f64>,
    p: DMatrix<f64>,
}

impl DiscreteKernel {
    /// Wraps a row-stochastic `p` that is reversible with respect to `pi`.
    pub fn from_matrix(p: DMatrix<f64>, pi: Vec<f64>) -> Result<Self> {
        let k = pi.len();
        if p.nrows() != k || p.ncols() != k || k < 2 {
            return Err(Error::domain("kernel must be square and match the stationary vector"));
        }
        let total: f64 = pi.iter().sum();
        if !(total > 0.0) || pi.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::domain("stationary weights must be nonnegative"));
        }
        let pi = pi.iter().map(|v| v / total).collect();
        Ok(Self {
            points: (0..k).map(|i| i as f64).collect(),
            pi,
            p,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// `1 − max |λ|` over all eigenvalues except the unit one.
    pub fn spectral_gap(&self) -> Result<f64> {
        let k = self.pi.len();
        let s = DMatrix::from_fn(k, k, |i, j| {
            let (a, b, pij) = (self.pi[i], self.pi[j], self.p[(i, j)]);
            // the ratio a/b overflows for subnormal b; this ordering stays finite
            if a > 0.0 && b > 0.0 && pij != 0.0 {
                a.sqrt() * pij / b.sqrt()
            } else {
                0.0
            }
        });
        // average with the transpose to remove rounding asymmetry
        let s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(s, 1e-14, 10_000)
            .ok_or_else(|| Error::numeric("symmetric eigensolver did not converge"))?;
        let values = eig.eigenvalues;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite eigenvalue in transition spectrum"));
        }
        let top = values.iamax();
        let second = values
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != top)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        Ok(1.0 - second)
    }

    /// Minimum over lower sets `{x_0..x_k}` of `Q(S, Sᶜ) / (π(S) π(Sᶜ))`.
    ///
    /// Flows and masses are summed directly from positive terms for every cut, so tiny
    /// tail sets keep full relative precision.
    pub fn interval_conductance(&self) -> f64 {
        let k = self.pi.len();
        let mut best = f64::INFINITY;
        for c in 0..k - 1 {
            let below: f64 = self.pi[..=c].iter().sum();
            let above: f64 = self.pi[c + 1..].iter().sum();
            let mut flow = 0.0;
            for i in 0..=c {
                for j in c + 1..k {
                    flow += self.pi[i] * self.p[(i, j)];
                }
            }
            let denom = below * above;
            if denom > 0.0 {
                best = best.min(flow / denom);
            }
        }
        best
    }
}

/// Random-walk Metropolis kernel on an even grid over the model's support bracket.
///
/// Proposals move along the infinite lattice `x + hℤ` with weights given by the proposal
/// density; moves that land off the grid are rejected. The kernel is reversible with
/// respect to the normalized posterior density at the grid points.
pub fn discretize_rwm(
    model: &InterceptModel,
    proposal: RwmProposal,
    grid_points: usize,
) -> Result<DiscreteKernel> {
    if grid_points < 101 {
        return Err(Error::domain(format!("need at least 101 grid points, got {grid_points}")));
    }
    let (lo, hi) = model.support_bracket();
    let h = (hi - lo) / (grid_points - 1) as f64;
    let points: Vec<f64> = (0..grid_points).map(|i| lo + h * i as f64).collect();
    let lp: Vec<f64> = points.iter().map(|&x| model.log_density_unchecked(x)).collect();
    let lp_max = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = lp.iter().map(|v| (v - lp_max).exp()).collect();
    let total: f64 = w.iter().sum();
    let pi: Vec<f64> = w.iter().map(|v| v / total).collect();

    let weights = lattice_weights(proposal, model.n(), h, grid_points - 1)?;
    let mut p = DMatrix::zeros(grid_points, grid_points);
    for i in 0..grid_points {
        let mut moved = 0.0;
        for j in 0..grid_points {
            if i == j {
                continue;
            }
            let q = weights[i.abs_diff(j)];
            if q == 0.0 {
                continue;
            }
            let a = (lp[j] - lp[i]).min(0.0).exp();
            p[(i, j)] = q * a;
            moved += q * a;
        }
        p[(i, i)] = 1.0 - moved;
    }
    Ok(DiscreteKernel { points, pi, p })
}

/// Spectral gap of the grid-discretized random-walk Metropolis kernel.
pub fn grid_spectral_gap(model: &InterceptModel, proposal: RwmProposal, grid_points: usize) -> Result<f64> {
    discretize_rwm(model, proposal, grid_points)?.spectral_gap()
}

/// Probability of a proposed lattice offset `k·h`, `k = 0..=max_k`, normalized over ℤ.
fn lattice_weights(proposal: RwmProposal, n: u64, h: f64, max_k: usize) -> Result<Vec<f64>> {
    match proposal {
        RwmProposal::Gaussian { scale } => {
            let mass = |k: usize| normal_pdf(k as f64 * h / scale);
            let mut norm = mass(0);
            let mut k = 1;
            while (k as f64) * h <= 40.0 * scale {
                norm += 2.0 * mass(k);
                k += 1;
            }
            Ok((0..=max_k).map(|k| mass(k) / norm).collect())
        }
        RwmProposal::UniformLogN => {
            let half = proposal.half_width(n)?;
            let inside = |k: usize| (k as f64) * h < half;
            let mut count = 1.0;
            let mut k = 1;
            while inside(k) {
                count += 2.0;
                k += 1;
            }
            Ok((0..=max_k).map(|k| if inside(k) { 1.0 / count } else { 0.0 }).collect())
        }
    }
}
