//! Samplers, diagnostics and ground-truth oracles for binomial models with very rare
//! successes.
//!
//! [`models`] defines the posteriors, [`distributions`] the random variate generators,
//! [`samplers`] the Markov kernels and chain runner, and [`diagnostics`] the estimators
//! used to compare them.

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod models;
pub mod samplers;

pub use error::{Error, Result};
