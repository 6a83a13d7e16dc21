//! Experiment runner for the `imcmc` samplers.
//!
//! Studies are declared as JSON ([`ExperimentConfig`]), executed cell by cell with
//! order-independent seeding ([`run_experiment`]) and summarized in `report.csv` and
//! `summary.json`. The `imcmc` binary wraps this crate.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod trace_io;

pub use config::{ExperimentConfig, GridPoint, SiteLayout, Study};
pub use data::{
    generate_regression_data, generate_synthetic_sites, load_regression_csv, load_site_csv, write_regression_csv,
    write_site_csv, RegressionData, SiteCounts, SiteRow,
};
pub use error::{HarnessError, Result};
pub use experiment::{read_report, run_experiment, ExperimentOutput, ReportRow, RunOptions, Summary, REPORT_COLUMNS};
