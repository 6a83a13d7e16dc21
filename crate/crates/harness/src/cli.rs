use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use imcmc_core::diagnostics::{default_truncation, diagnose, DiagnoseOptions, DiagnosticsReport, DEFAULT_THRESHOLDS};
use imcmc_core::distributions::RngStream;
use imcmc_core::models::{quadrature_oracle, InterceptModel, Link};
use imcmc_core::samplers::{run_chain, Init, KernelSpec, Model};
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::data::{
    generate_regression_data, generate_synthetic_sites, load_regression_csv, load_site_csv, write_regression_csv,
    write_site_csv,
};
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, RunOptions};
use crate::trace_io::{read_trace_csv, write_atomically, write_trace_csv};

/// Environment variable that replaces the configured base seed.
pub const SEED_ENV: &str = "IMCMC_SEED";

#[derive(Debug, Parser)]
#[command(name = "imcmc", version, about = "Samplers and diagnostics for imbalanced binomial data")]
pub struct Cli {
    /// Report errors on standard error as one JSON object.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Base seed; overrides IMCMC_SEED and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one kernel on one model and write its trace.
    Sample(SampleArgs),
    /// Diagnose the columns of a trace file.
    Diagnose(DiagnoseArgs),
    /// Run a study described by a JSON config.
    Experiment(ExperimentArgs),
    /// Quadrature summary of an intercept-model posterior.
    Oracle(OracleArgs),
    /// Write synthetic data sets.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Intercept,
    Hierarchical,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitKind {
    Warm,
    Prior,
}

#[derive(Debug, Args)]
struct InterceptArgs {
    #[arg(long, default_value = "logit")]
    link: Link,
    #[arg(long, default_value_t = 1)]
    y: u64,
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Prior mean.
    #[arg(long = "b", default_value_t = 0.0, allow_negative_numbers = true)]
    prior_mean: f64,
    /// Prior variance.
    #[arg(long = "B", default_value_t = 100.0)]
    prior_var: f64,
}

impl InterceptArgs {
    fn model(&self) -> Result<InterceptModel> {
        Ok(InterceptModel::new(self.y, self.n, self.link, self.prior_mean, self.prior_var)?)
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum, default_value = "intercept")]
    model: ModelKind,
    #[command(flatten)]
    intercept: InterceptArgs,
    /// Half-Cauchy scale of the hierarchical model.
    #[arg(long = "A", default_value_t = 1.0)]
    sigma_scale: f64,
    /// Site counts (`site_id,n,y`) for the hierarchical model.
    #[arg(long)]
    sites: Option<PathBuf>,
    /// Regression data (`y,n,x1..xp`).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Kernel name, or a JSON kernel specification.
    #[arg(long, default_value = "rwm")]
    kernel: String,
    #[arg(long = "T", default_value_t = 10_000)]
    total: usize,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, value_enum, default_value = "warm")]
    init: InitKind,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Trace CSV (`iteration,value...`).
    trace: PathBuf,
    #[arg(long, default_value_t = 50)]
    max_lag: usize,
    /// Truncation lag of ess_truncated; defaults to min(n, T/10).
    #[arg(long)]
    truncation: Option<usize>,
    /// Compare the first column with the oracle of the intercept model given below.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    intercept: InterceptArgs,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep finished cells from a previous run in the same directory.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "intercept")]
    model: ModelKind,
    #[command(flatten)]
    intercept: InterceptArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenerateCommand {
    /// Synthetic site counts.
    Sites {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0.74)]
        sparsity: f64,
        #[arg(long, default_value_t = 13)]
        median_nonzero: u64,
        #[arg(long, default_value_t = 1_000_000)]
        n_scale: u64,
        #[arg(long, default_value = "sites.csv")]
        out: PathBuf,
    },
    /// Simulated logistic regression data.
    Regression {
        #[arg(long, default_value_t = 1000)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        p: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value = "regression.csv")]
        out: PathBuf,
        /// Also write the generating coefficients as JSON.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

/// Seed precedence: command-line flag, then `IMCMC_SEED`, then `fallback`.
fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::config(format!("{SEED_ENV} is not an unsigned integer: {v:?}"))),
        Err(_) => Ok(fallback),
    }
}

fn parse_kernel(text: &str) -> Result<KernelSpec> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| HarnessError::config(format!("kernel specification: {e}")))
    } else {
        Ok(KernelSpec::from_name(text)?)
    }
}

fn emit(out: Option<&PathBuf>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    match out {
        Some(path) => write_atomically(path, |w| writeln!(w, "{text}")),
        None => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn sample(args: &SampleArgs, seed: u64) -> Result<()> {
    let spec = parse_kernel(&args.kernel)?;
    let model = match args.model {
        ModelKind::Intercept => Model::Intercept(args.intercept.model()?),
        ModelKind::Hierarchical => {
            let path = args
                .sites
                .as_ref()
                .ok_or_else(|| HarnessError::config("the hierarchical model needs --sites"))?;
            let sites = load_site_csv(path)?;
            Model::Hierarchical(sites.to_model(args.intercept.prior_mean, args.intercept.prior_var, args.sigma_scale)?)
        }
        ModelKind::Regression => {
            let path = args
                .data
                .as_ref()
                .ok_or_else(|| HarnessError::config("the regression model needs --data"))?;
            Model::Regression(load_regression_csv(path, args.intercept.prior_var)?)
        }
    };
    let init = match args.init {
        InitKind::Warm => Init::WarmStart,
        InitKind::Prior => Init::Prior,
    };
    let mut rng = RngStream::new(seed, args.stream);
    let trace = run_chain(&spec, &model, &init, args.total, args.burn_in, &mut rng)?;
    write_atomically(&args.out, |w| write_trace_csv(w, &trace, args.burn_in, args.thin))?;
    emit(
        None,
        &json!({
            "trace": args.out,
            "kernel": trace.kernel_id,
            "model": trace.model_id,
            "seed": seed,
            "stream": args.stream,
            "samples": trace.len(),
            "cost_units": trace.cost_units,
            "accept_rate": trace.accept_rate(),
        }),
    )
}

#[derive(Serialize)]
struct ColumnReport {
    name: String,
    report: DiagnosticsReport,
}

fn diagnose_cmd(args: &DiagnoseArgs) -> Result<()> {
    let table = read_trace_csv(&args.trace)?;
    let oracle = if args.oracle {
        Some(quadrature_oracle(&args.intercept.model()?)?)
    } else {
        None
    };
    let mut reports = Vec::new();
    for (j, (name, series)) in table.names.iter().zip(&table.columns).enumerate() {
        let truncation = args
            .truncation
            .unwrap_or_else(|| default_truncation(args.intercept.n, series.len()));
        let report = diagnose(
            series,
            &DiagnoseOptions {
                max_lag: args.max_lag,
                truncation,
                oracle: if j == 0 { oracle.as_ref() } else { None },
                accept_flags: None,
                thresholds: DEFAULT_THRESHOLDS,
            },
        )?;
        reports.push(ColumnReport {
            name: name.clone(),
            report,
        });
    }
    emit(args.out.as_ref(), &json!({ "trace": args.trace, "columns": reports }))
}

fn experiment(args: &ExperimentArgs, seed: Option<u64>, threads: usize) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    cfg.base_seed = resolve_seed(seed, cfg.base_seed)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    let result = run_experiment(
        &cfg,
        &RunOptions {
            threads,
            resume: args.resume,
        },
    )?;
    for e in &result.summary.errors {
        eprintln!("warning: {e}");
    }
    emit(
        None,
        &json!({
            "report": result.report_path,
            "summary": result.summary_path,
            "cells": result.rows.len(),
            "errors": result.summary.errors.len(),
        }),
    )?;
    Ok(result.summary.errors.is_empty())
}

fn oracle(args: &OracleArgs) -> Result<()> {
    if args.model != ModelKind::Intercept {
        return Err(HarnessError::config("the oracle covers the intercept model only"));
    }
    let m = args.intercept.model()?;
    let o = quadrature_oracle(&m)?;
    let (lo, hi) = o.bracket();
    let (wlo, whi) = m.warm_start_interval();
    emit(
        args.out.as_ref(),
        &json!({
            "model": { "link": m.link(), "y": m.y(), "n": m.n(), "b": m.prior_mean(), "B": m.prior_var() },
            "mode": m.find_mode(),
            "mean": o.mean(),
            "variance": o.variance(),
            "bracket": [lo, hi],
            "log_normalizer": o.log_normalizer(),
            "warm_start": [wlo, whi],
        }),
    )
}

fn generate(cmd: &GenerateCommand, seed: u64) -> Result<()> {
    let mut rng = RngStream::new(seed, 0);
    match cmd {
        GenerateCommand::Sites {
            count,
            sparsity,
            median_nonzero,
            n_scale,
            out,
        } => {
            let sites = generate_synthetic_sites(*count, *sparsity, *median_nonzero, *n_scale, &mut rng)?;
            write_site_csv(out, &sites)?;
            emit(
                None,
                &json!({
                    "sites": out,
                    "count": sites.len(),
                    "zero_fraction": sites.zero_fraction(),
                    "nonzero_median": sites.nonzero_median(),
                }),
            )
        }
        GenerateCommand::Regression {
            rows,
            p,
            trials,
            alpha,
            out,
            truth,
        } => {
            let data = generate_regression_data(*rows, *p, *trials, *alpha, 100.0, &mut rng)?;
            write_regression_csv(out, &data.model)?;
            if let Some(path) = truth {
                emit(Some(path), &json!({ "beta": data.beta }))?;
            }
            emit(None, &json!({ "data": out, "rows": rows, "mean_y": data.mean_successes() }))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Sample(args) => sample(args, resolve_seed(cli.seed, 0)?).map(|_| 0),
        Command::Diagnose(args) => diagnose_cmd(args).map(|_| 0),
        Command::Experiment(args) => experiment(args, cli.seed, cli.threads).map(|clean| if clean { 0 } else { 3 }),
        Command::Oracle(args) => oracle(args).map(|_| 0),
        Command::Generate(cmd) => generate(cmd, resolve_seed(cli.seed, 0)?).map(|_| 0),
    }
}

fn report_error(err: &HarnessError, json_errors: bool) {
    if json_errors {
        eprintln!("{}", serde_json::to_string(&err.record()).expect("records serialize"));
    } else {
        eprintln!("error: {err}");
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json_errors = argv.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            if json_errors {
                report_error(&HarnessError::config(e.to_string().trim().to_string()), true);
            } else {
                let _ = e.print();
            }
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            report_error(&e, cli.json_errors);
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flag_beats_config_seed() {
        assert_eq!(resolve_seed(Some(7), 3).unwrap(), 7);
    }

    #[test]
    fn kernel_text_forms() {
        assert_eq!(parse_kernel("rwm").unwrap().id(), "rwm_gaussian");
        let spec = parse_kernel(r#"{"kernel": "rwm", "proposal": {"type": "uniform_log_n"}}"#).unwrap();
        assert_eq!(spec.id(), "rwm_uniform");
        assert!(matches!(parse_kernel("{oops"), Err(HarnessError::Config(_))));
        assert!(parse_kernel("nope").is_err());
    }
}
