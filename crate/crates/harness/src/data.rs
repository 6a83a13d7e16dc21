//! Synthetic data generators and CSV ingestion.

use std::io::Write;
use std::path::Path;

use imcmc_core::distributions::RngStream;
use imcmc_core::models::{HierarchicalModel, RegressionModel, Site};
use nalgebra::DMatrix;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Log-scale spread of the nonzero synthetic counts; puts their lower quartile at about
/// half the median.
const NONZERO_LOG_SD: f64 = 0.92;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRow {
    pub site_id: String,
    pub n: u64,
    pub y: u64,
}

/// Per-site trial and success counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SiteCounts {
    pub rows: Vec<SiteRow>,
}

impl SiteCounts {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn zero_fraction(&self) -> f64 {
        self.rows.iter().filter(|r| r.y == 0).count() as f64 / self.rows.len().max(1) as f64
    }

    /// Median of the nonzero `y`, averaging the two middle values for even counts.
    pub fn nonzero_median(&self) -> Option<f64> {
        let mut ys: Vec<u64> = self.rows.iter().map(|r| r.y).filter(|&y| y > 0).collect();
        if ys.is_empty() {
            return None;
        }
        ys.sort_unstable();
        let k = ys.len();
        Some(if k % 2 == 1 {
            ys[k / 2] as f64
        } else {
            0.5 * (ys[k / 2 - 1] + ys[k / 2]) as f64
        })
    }

    pub fn total_successes(&self) -> u64 {
        self.rows.iter().map(|r| r.y).sum()
    }

    pub fn to_model(&self, prior_mean: f64, prior_var: f64, sigma_scale: f64) -> Result<HierarchicalModel> {
        let sites = self.rows.iter().map(|r| Site { y: r.y, n: r.n }).collect();
        Ok(HierarchicalModel::new(sites, prior_mean, prior_var, sigma_scale)?)
    }
}

/// Draws `count` sites with `n_scale` trials each.
///
/// A site is empty with probability `sparsity`; otherwise its count is a rounded
/// log-normal with median `median_nonzero`, clamped to `[1, n_scale]`.
pub fn generate_synthetic_sites(
    count: usize,
    sparsity: f64,
    median_nonzero: u64,
    n_scale: u64,
    rng: &mut RngStream,
) -> Result<SiteCounts> {
    if count == 0 {
        return Err(HarnessError::config("need at least one site"));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(HarnessError::config(format!("sparsity must lie in [0, 1), got {sparsity}")));
    }
    if median_nonzero == 0 || median_nonzero >= n_scale {
        return Err(HarnessError::config(format!(
            "median nonzero count {median_nonzero} is infeasible with {n_scale} trials per site"
        )));
    }
    let log_median = (median_nonzero as f64).ln();
    let rows = (0..count)
        .map(|i| {
            let empty = rng.open01() < sparsity;
            let z: f64 = StandardNormal.sample(rng);
            let y = if empty {
                0
            } else {
                ((log_median + NONZERO_LOG_SD * z).exp().round() as u64).clamp(1, n_scale)
            };
            SiteRow {
                site_id: format!("s{}", i + 1),
                n: n_scale,
                y,
            }
        })
        .collect();
    Ok(SiteCounts { rows })
}

/// Simulated regression data together with the coefficients that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub model: RegressionModel,
    pub beta: Vec<f64>,
}

impl RegressionData {
    pub fn mean_successes(&self) -> f64 {
        let y = self.model.successes();
        y.iter().sum::<u64>() as f64 / y.len() as f64
    }
}

/// Logistic design with an intercept column, `x_{i,2:p} ~ U(−1, 1)`, `β₁ = α`,
/// `β_{2:p} ~ N(0, 1)` and `y_i ~ Binom(n_i, logit⁻¹(x_i β))`.
pub fn generate_regression_data(
    rows: usize,
    p: usize,
    trials: u64,
    alpha: f64,
    prior_var: f64,
    rng: &mut RngStream,
) -> Result<RegressionData> {
    if p < 2 {
        return Err(HarnessError::config(format!("regression needs p >= 2, got {p}")));
    }
    if rows == 0 || trials == 0 {
        return Err(HarnessError::config("regression needs rows and trials"));
    }
    let mut beta = vec![alpha];
    beta.extend((1..p).map(|_| -> f64 { StandardNormal.sample(rng) }));
    let mut x = DMatrix::from_element(rows, p, 1.0);
    for i in 0..rows {
        for j in 1..p {
            x[(i, j)] = 2.0 * rng.open01() - 1.0;
        }
    }
    let mut y = Vec::with_capacity(rows);
    for i in 0..rows {
        let eta: f64 = (0..p).map(|j| x[(i, j)] * beta[j]).sum();
        let prob = 1.0 / (1.0 + (-eta).exp());
        let draw = Binomial::new(trials, prob)
            .map_err(|e| HarnessError::config(format!("binomial parameters: {e}")))?;
        y.push(draw.sample(rng));
    }
    let model = RegressionModel::new(x, y, vec![trials; rows], prior_var)?;
    Ok(RegressionData { model, beta })
}

fn parse_count(field: Option<&str>, name: &str, path: &Path, line: u64) -> Result<u64> {
    let raw = field.ok_or_else(|| HarnessError::parse(path, line, format!("missing {name}")))?;
    raw.trim()
        .parse::<u64>()
        .map_err(|_| HarnessError::parse(path, line, format!("{name} is not a nonnegative integer: {raw:?}")))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => HarnessError::parse(path, line, format!("{other:?}")),
    }
}

/// Reads a `site_id,n,y` file. Line numbers in errors count the header as line 1.
pub fn load_site_csv(path: impl AsRef<Path>) -> Result<SiteCounts> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["site_id", "n", "y"] {
        return Err(HarnessError::parse(path, 1, format!("expected header site_id,n,y, got {}", names.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(HarnessError::parse(path, line, format!("expected 3 fields, found {}", record.len())));
        }
        let site_id = record[0].trim().to_string();
        if site_id.is_empty() {
            return Err(HarnessError::parse(path, line, "empty site_id"));
        }
        let n = parse_count(record.get(1), "n", path, line)?;
        let y = parse_count(record.get(2), "y", path, line)?;
        if n == 0 {
            return Err(HarnessError::parse(path, line, "n must be at least 1"));
        }
        if y > n {
            return Err(HarnessError::parse(path, line, format!("y exceeds n ({y} > {n})")));
        }
        rows.push(SiteRow { site_id, n, y });
    }
    Ok(SiteCounts { rows })
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(std::io::BufWriter::new(file))
}

pub fn write_site_csv(path: impl AsRef<Path>, sites: &SiteCounts) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(create(path)?);
    let io = |e: csv::Error| csv_error(path, e);
    w.write_record(["site_id", "n", "y"]).map_err(io)?;
    for r in &sites.rows {
        w.write_record([r.site_id.as_str(), &r.n.to_string(), &r.y.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes `y,n,x1..xp`.
pub fn write_regression_csv(path: impl AsRef<Path>, model: &RegressionModel) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let io = |e: std::io::Error| HarnessError::io(path, e);
    let p = model.num_coefficients();
    let header: Vec<String> = ["y".to_string(), "n".to_string()]
        .into_iter()
        .chain((1..=p).map(|j| format!("x{j}")))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    let x = model.design();
    for i in 0..model.num_rows() {
        let mut line = format!("{},{}", model.successes()[i], model.trials()[i]);
        for j in 0..p {
            line.push(',');
            line.push_str(&format!("{:?}", x[(i, j)]));
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a `y,n,x1..xp` file into a model with prior variance `prior_var`.
pub fn load_regression_csv(path: impl AsRef<Path>, prior_var: f64) -> Result<RegressionModel> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let p = names.len().saturating_sub(2);
    let expected: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    if names.len() < 3 || names[0] != "y" || names[1] != "n" || names[2..] != expected {
        return Err(HarnessError::parse(path, 1, format!("expected header y,n,x1..xp, got {}", names.join(","))));
    }
    let (mut y, mut n, mut values) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != p + 2 {
            return Err(HarnessError::parse(path, line, format!("expected {} fields, found {}", p + 2, record.len())));
        }
        let yi = parse_count(record.get(0), "y", path, line)?;
        let ni = parse_count(record.get(1), "n", path, line)?;
        if yi > ni {
            return Err(HarnessError::parse(path, line, format!("y exceeds n ({yi} > {ni})")));
        }
        for j in 0..p {
            let raw = record[j + 2].trim();
            let v: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| HarnessError::parse(path, line, format!("x{} is not a finite number: {raw:?}", j + 1)))?;
            values.push(v);
        }
        y.push(yi);
        n.push(ni);
    }
    if y.is_empty() {
        return Err(HarnessError::parse(path, 2, "no data rows"));
    }
    let x = DMatrix::from_row_slice(y.len(), p, &values);
    Ok(RegressionModel::new(x, y, n, prior_var)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn single_row() {
        let dir = tempfile::tempdir().unwrap();
        let s = load_site_csv(write(&dir, "a.csv", "site_id,n,y\ns1,100,3\n")).unwrap();
        assert_eq!(
            s.rows,
            vec![SiteRow {
                site_id: "s1".into(),
                n: 100,
                y: 3
            }]
        );
    }

    #[test]
    fn y_above_n_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_site_csv(write(&dir, "a.csv", "site_id,n,y\ns1,3,100\n")).unwrap_err();
        match &err {
            HarnessError::Parse { line, message, .. } => {
                assert_eq!(*line, 2);
                assert!(message.contains("y exceeds n"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn malformed_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        for (text, line) in [
            ("site_id,n,y\ns1,10,1\ns2,ten,1\n", 3),
            ("site_id,n,y\ns1,10,-1\n", 2),
            ("site_id,n,y\ns1,10\n", 2),
            ("site_id,n,y\ns1,0,0\n", 2),
            ("site,n,y\ns1,10,1\n", 1),
        ] {
            match load_site_csv(write(&dir, "b.csv", text)) {
                Err(HarnessError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_file_is_io() {
        assert!(matches!(load_site_csv("/nonexistent/sites.csv"), Err(HarnessError::Io { .. })));
    }

    #[test]
    fn site_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = RngStream::new(5, 0);
        let sites = generate_synthetic_sites(300, 0.5, 13, 10_000, &mut rng).unwrap();
        let path = dir.path().join("sites.csv");
        write_site_csv(&path, &sites).unwrap();
        assert_eq!(load_site_csv(&path).unwrap(), sites);
    }

    #[test]
    fn infeasible_site_targets() {
        let mut rng = RngStream::new(1, 0);
        assert!(generate_synthetic_sites(10, 0.0, 100, 100, &mut rng).is_err());
        assert!(generate_synthetic_sites(10, 1.0, 5, 100, &mut rng).is_err());
        assert!(generate_synthetic_sites(10, -0.1, 5, 100, &mut rng).is_err());
        assert!(generate_synthetic_sites(0, 0.5, 5, 100, &mut rng).is_err());
    }

    #[test]
    fn default_site_targets() {
        let mut rng = RngStream::new(2024, 0);
        let s = generate_synthetic_sites(10_000, 0.74, 13, 1_000_000, &mut rng).unwrap();
        let zf = s.zero_fraction();
        assert!((0.70..=0.78).contains(&zf), "{zf}");
        let med = s.nonzero_median().unwrap();
        assert!((10.0..=16.0).contains(&med), "{med}");
        let centre = s
            .rows
            .iter()
            .map(|r| ((r.y as f64 + 1.0) / (r.n as f64 - r.y as f64 - 1.0)).ln())
            .sum::<f64>()
            / s.len() as f64;
        assert!((-14.0..=-11.0).contains(&centre), "{centre}");
    }

    #[test]
    fn generators_are_deterministic() {
        let a = generate_synthetic_sites(50, 0.3, 4, 1000, &mut RngStream::new(9, 1)).unwrap();
        let b = generate_synthetic_sites(50, 0.3, 4, 1000, &mut RngStream::new(9, 1)).unwrap();
        assert_eq!(a, b);
        let r1 = generate_regression_data(20, 3, 50, -2.0, 100.0, &mut RngStream::new(9, 2)).unwrap();
        let r2 = generate_regression_data(20, 3, 50, -2.0, 100.0, &mut RngStream::new(9, 2)).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn vanishing_rate() {
        let d = generate_regression_data(1000, 20, 1000, -30.0, 100.0, &mut RngStream::new(3, 0)).unwrap();
        assert!(d.mean_successes() < 0.01);
        assert_eq!(d.beta[0], -30.0);
        let x = d.model.design();
        assert!((0..1000).all(|i| x[(i, 0)] == 1.0));
        assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn regression_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = generate_regression_data(30, 4, 200, -3.0, 100.0, &mut RngStream::new(4, 0)).unwrap();
        let path = dir.path().join("reg.csv");
        write_regression_csv(&path, &d.model).unwrap();
        assert_eq!(load_regression_csv(&path, 100.0).unwrap(), d.model);
    }

    #[test]
    fn regression_csv_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "r.csv", "y,n,x1,x2\n1,10,1.0,0.5\n11,10,1.0,0.5\n");
        assert!(matches!(load_regression_csv(&p, 1.0), Err(HarnessError::Parse { line: 3, .. })));
        let p = write(&dir, "r.csv", "y,n,x2\n1,10,1.0\n");
        assert!(matches!(load_regression_csv(&p, 1.0), Err(HarnessError::Parse { line: 1, .. })));
        let p = write(&dir, "r.csv", "y,n,x1\n1,10,abc\n");
        assert!(matches!(load_regression_csv(&p, 1.0), Err(HarnessError::Parse { line: 2, .. })));
    }
}
