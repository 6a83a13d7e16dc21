//! Random variate generators and special functions.

mod normal;
mod polya_gamma;
mod rng;
mod truncated_normal;

pub use normal::{
    normal_cdf, normal_hazard_lower, normal_log_cdf, normal_log_pdf, normal_pdf,
    normal_quantile,
};
pub use polya_gamma::{
    pg_moments, sample_pg, PgParams, PgSampler, PolyaGammaOne, APPROXIMATE_LIMIT,
    EXACT_COST_LIMIT, SERIES_SWITCH,
};
pub use rng::RngStream;
pub use truncated_normal::{sample_truncated_normal, TruncatedNormal, TAIL_CUTOFF};

