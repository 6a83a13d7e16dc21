use std::fmt;
use std::path::{Path, PathBuf};

use imcmc_core::models::Link;
use imcmc_core::samplers::{Init, KernelSpec};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Iterations and burn-in of the table studies.
pub const TABLE_T: usize = 50_000;
pub const TABLE_BURN_IN: usize = 20_000;
/// Iterations and burn-in of the scaling study.
pub const SCALING_T: usize = 1_000_000;
pub const SCALING_BURN_IN: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    InterceptGrid,
    ConstantRatio,
    RegressionImbalance,
    Hierarchical,
    Scaling,
    Conductance,
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Study::InterceptGrid => "intercept_grid",
            Study::ConstantRatio => "constant_ratio",
            Study::RegressionImbalance => "regression_imbalance",
            Study::Hierarchical => "hierarchical",
            Study::Scaling => "scaling",
            Study::Conductance => "conductance",
        }
    }

    /// Studies whose grid points are single-parameter intercept models.
    pub fn is_intercept(&self) -> bool {
        matches!(
            self,
            Study::InterceptGrid | Study::ConstantRatio | Study::Scaling | Study::Conductance
        )
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A kernel given either by name with default settings or as a full specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelChoice {
    Name(String),
    Spec(KernelSpec),
}

impl KernelChoice {
    pub fn resolve(&self) -> Result<KernelSpec> {
        match self {
            KernelChoice::Name(name) => Ok(KernelSpec::from_name(name)?),
            KernelChoice::Spec(spec) => Ok(*spec),
        }
    }
}

/// Synthetic site layout for the hierarchical study; the trial count per site comes
/// from the `n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteLayout {
    pub count: usize,
    pub sparsity: f64,
    pub median_nonzero: u64,
}

impl Default for SiteLayout {
    fn default() -> Self {
        Self {
            count: 200,
            sparsity: 0.74,
            median_nonzero: 13,
        }
    }
}

/// Declarative description of one study.
///
/// Grid fields a study does not use are ignored. `n` is the trial count of the intercept
/// model, the per-row trial count in the regression study, and the per-site trial count
/// in the hierarchical study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub study: Study,
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default)]
    pub y: Vec<u64>,
    #[serde(default)]
    pub p: Vec<usize>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// Link of intercept models sampled by link-agnostic kernels. Data-augmentation
    /// kernels always use their own link.
    #[serde(default)]
    pub link: Option<Link>,
    #[serde(default)]
    pub prior_mean: Option<f64>,
    #[serde(default)]
    pub prior_var: Option<f64>,
    /// Half-Cauchy scale `A` of the hierarchical model.
    #[serde(default = "default_sigma_scale")]
    pub sigma_scale: f64,
    pub kernels: Vec<KernelChoice>,
    #[serde(rename = "T", default)]
    pub total: Option<usize>,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub init: Option<Init>,
    /// Write thinned traces under `traces/`.
    #[serde(default)]
    pub traces: bool,
    #[serde(default = "default_thin")]
    pub thin: usize,
    /// Truncation lag of `ess_truncated`; `min(n, T/10)` when absent.
    #[serde(default)]
    pub truncation: Option<usize>,
    /// Rows of the simulated regression design.
    #[serde(default = "default_rows")]
    pub rows: usize,
    #[serde(default)]
    pub sites: SiteLayout,
    /// Site counts file replacing the synthetic sites; the `n` grid is then ignored.
    #[serde(default)]
    pub sites_csv: Option<PathBuf>,
    /// Lattice size of the discretized random-walk kernels in the conductance study.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_sigma_scale() -> f64 {
    1.0
}

fn default_replicates() -> usize {
    1
}

fn default_thin() -> usize {
    10
}

fn default_rows() -> usize {
    1000
}

fn default_grid_points() -> usize {
    401
}

/// One model setting of a study grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: u64,
    pub y: Option<u64>,
    pub p: Option<usize>,
    pub alpha: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::config(format!("invalid config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg = Self::from_json(&text)
            .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn total_iterations(&self) -> usize {
        self.total.unwrap_or(match self.study {
            Study::Scaling => SCALING_T,
            _ => TABLE_T,
        })
    }

    pub fn burn_in_iterations(&self) -> usize {
        self.burn_in.unwrap_or(match self.study {
            Study::Scaling => SCALING_BURN_IN,
            _ => TABLE_BURN_IN,
        })
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean.unwrap_or(match self.study {
            Study::Hierarchical => -12.0,
            _ => 0.0,
        })
    }

    pub fn prior_var(&self) -> f64 {
        self.prior_var.unwrap_or(match self.study {
            Study::Hierarchical => 36.0,
            _ => 100.0,
        })
    }

    pub fn init(&self) -> Init {
        self.init.clone().unwrap_or(Init::WarmStart)
    }

    pub fn kernel_specs(&self) -> Result<Vec<KernelSpec>> {
        self.kernels.iter().map(KernelChoice::resolve).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::config(msg));
        if self.kernels.is_empty() {
            return fail("kernels must not be empty".into());
        }
        let (total, burn_in) = (self.total_iterations(), self.burn_in_iterations());
        if total <= burn_in {
            return fail(format!("T = {total} must exceed burn_in = {burn_in}"));
        }
        if self.replicates == 0 {
            return fail("replicates must be at least 1".into());
        }
        if self.thin == 0 {
            return fail("thin must be at least 1".into());
        }
        if !(self.prior_var() > 0.0) || !(self.sigma_scale > 0.0) {
            return fail("prior_var and sigma_scale must be positive".into());
        }
        let need = |name: &str, empty: bool| -> Result<()> {
            if empty {
                Err(HarnessError::config(format!("study {} needs a nonempty {name} grid", self.study)))
            } else {
                Ok(())
            }
        };
        match self.study {
            Study::InterceptGrid | Study::Scaling | Study::Conductance => {
                need("n", self.n.is_empty())?;
                need("y", self.y.is_empty())?;
            }
            Study::ConstantRatio => {
                need("n", self.n.is_empty())?;
                if self.n.len() != self.y.len() {
                    return fail("constant_ratio pairs n and y elementwise; lengths differ".into());
                }
            }
            Study::RegressionImbalance => {
                need("n", self.n.is_empty())?;
                need("p", self.p.is_empty())?;
                need("alpha", self.alpha.is_empty())?;
                if self.p.iter().any(|&p| p < 2) {
                    return fail("regression needs p >= 2".into());
                }
                if self.rows == 0 {
                    return fail("rows must be at least 1".into());
                }
            }
            Study::Hierarchical => {
                if self.sites_csv.is_none() {
                    need("n", self.n.is_empty())?;
                }
            }
        }
        if self.study.is_intercept() {
            for (i, &n) in self.n.iter().enumerate() {
                let ys: Vec<u64> = if self.study == Study::ConstantRatio {
                    vec![self.y[i]]
                } else {
                    self.y.clone()
                };
                if let Some(y) = ys.into_iter().find(|&y| y > n) {
                    return fail(format!("grid point y = {y} exceeds n = {n}"));
                }
            }
        }
        for spec in self.kernel_specs()? {
            let ok = match self.study {
                Study::RegressionImbalance => {
                    matches!(spec, KernelSpec::PgDaRegression { .. } | KernelSpec::Hmc { .. })
                }
                Study::Hierarchical => {
                    matches!(spec, KernelSpec::HierHybrid { .. } | KernelSpec::HierPgDa { .. })
                }
                _ => matches!(
                    spec,
                    KernelSpec::PgDa { .. }
                        | KernelSpec::AcDa
                        | KernelSpec::Rwm { .. }
                        | KernelSpec::AdaptiveMetropolis
                        | KernelSpec::Hmc { .. }
                ),
            };
            if !ok {
                return fail(format!("kernel {} does not apply to study {}", spec.id(), self.study));
            }
        }
        if self.study == Study::Conductance && self.grid_points < 101 {
            return fail("grid_points must be at least 101".into());
        }
        Ok(())
    }

    /// Grid points in report order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let point = |n| GridPoint {
            n,
            y: None,
            p: None,
            alpha: None,
        };
        match self.study {
            Study::InterceptGrid | Study::Scaling | Study::Conductance => self
                .n
                .iter()
                .flat_map(|&n| self.y.iter().map(move |&y| GridPoint { y: Some(y), ..point(n) }))
                .collect(),
            Study::ConstantRatio => self
                .n
                .iter()
                .zip(&self.y)
                .map(|(&n, &y)| GridPoint { y: Some(y), ..point(n) })
                .collect(),
            Study::RegressionImbalance => {
                let mut out = Vec::new();
                for &n in &self.n {
                    for &p in &self.p {
                        for &alpha in &self.alpha {
                            out.push(GridPoint {
                                p: Some(p),
                                alpha: Some(alpha),
                                ..point(n)
                            });
                        }
                    }
                }
                out
            }
            Study::Hierarchical => {
                if self.sites_csv.is_some() {
                    vec![point(0)]
                } else {
                    self.n.iter().map(|&n| point(n)).collect()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(study: &str) -> String {
        format!(r#"{{"study": "{study}", "kernels": ["pg_da"], "output_dir": "out""#)
    }

    #[test]
    fn defaults_by_study() {
        let c = ExperimentConfig::from_json(&(base("scaling") + r#", "n": [10, 100], "y": [1]}"#)).unwrap();
        c.validate().unwrap();
        assert_eq!(c.total_iterations(), SCALING_T);
        assert_eq!(c.burn_in_iterations(), SCALING_BURN_IN);
        assert_eq!(c.prior_var(), 100.0);
        assert_eq!(c.grid().len(), 2);

        let h = ExperimentConfig::from_json(
            r#"{"study": "hierarchical", "n": [10000], "kernels": ["hier_hybrid"], "output_dir": "o"}"#,
        )
        .unwrap();
        h.validate().unwrap();
        assert_eq!(h.total_iterations(), TABLE_T);
        assert_eq!((h.prior_mean(), h.prior_var()), (-12.0, 36.0));
        assert_eq!(h.sites, SiteLayout::default());
    }

    #[test]
    fn rejects_invalid() {
        let bad = [
            base("intercept_grid") + r#", "n": [], "y": [1]}"#,
            base("intercept_grid") + r#", "n": [10], "y": [1], "T": 100, "burn_in": 100}"#,
            base("intercept_grid") + r#", "n": [10], "y": [1], "replicates": 0}"#,
            base("intercept_grid") + r#", "n": [10], "y": [20]}"#,
            base("constant_ratio") + r#", "n": [10, 20], "y": [1]}"#,
            base("regression_imbalance") + r#", "n": [1000], "p": [20], "alpha": [-5]}"#,
            r#"{"study": "intercept_grid", "n": [10], "y": [1], "kernels": ["nope"], "output_dir": "o"}"#.to_string(),
        ];
        for text in bad {
            let r = ExperimentConfig::from_json(&text).and_then(|c| c.validate());
            assert!(matches!(&r, Err(e) if e.exit_code() == 2), "{text}");
        }
        assert!(ExperimentConfig::from_json(r#"{"study": "unknown", "kernels": [], "output_dir": "o"}"#).is_err());
    }

    #[test]
    fn kernel_specs_parse_both_forms() {
        let c = ExperimentConfig::from_json(
            r#"{"study": "intercept_grid", "n": [10], "y": [1], "output_dir": "o",
                "kernels": ["rwm_uniform", {"kernel": "rwm", "proposal": {"type": "gaussian", "scale": 0.5}}]}"#,
        )
        .unwrap();
        let specs = c.kernel_specs().unwrap();
        assert_eq!(specs[0].id(), "rwm_uniform");
        assert_eq!(specs[1].id(), "rwm_gaussian");
    }

    #[test]
    fn grid_orders() {
        let c = ExperimentConfig::from_json(&(base("constant_ratio") + r#", "n": [10000, 20000], "y": [1, 2]}"#)).unwrap();
        let g = c.grid();
        assert_eq!((g[1].n, g[1].y), (20000, Some(2)));
        let r = ExperimentConfig::from_json(
            r#"{"study": "regression_imbalance", "n": [1000], "p": [20, 100], "alpha": [-5, -8],
                "kernels": ["hmc"], "output_dir": "o"}"#,
        )
        .unwrap();
        r.validate().unwrap();
        let g = r.grid();
        assert_eq!(g.len(), 4);
        assert_eq!((g[1].p, g[1].alpha), (Some(20), Some(-8.0)));
    }
}
