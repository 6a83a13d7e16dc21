//! Standard normal density, distribution and quantile functions.
//!
//! The distribution function is evaluated through `erfc`, which keeps relative accuracy
//! deep into the lower tail. Below the underflow point of `erfc` the log-cdf switches to
//! its asymptotic series, so `normal_log_cdf` stays finite for every finite argument.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument `erfc(-x/sqrt 2)` underflows, so the log-cdf uses the series.
const LOG_CDF_SERIES_CUTOFF: f64 = -37.0;

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

#[inline]
pub fn normal_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `log Φ(x)`, accurate in both tails.
pub fn normal_log_cdf(x: f64) -> f64 {
    if x > 5.0 {
        (-normal_cdf(-x)).ln_1p()
    } else if x > LOG_CDF_SERIES_CUTOFF {
        normal_cdf(x).ln()
    } else {
        // Φ(x) = φ(x)/|x| · (1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸ - 945/x¹⁰ + ...)
        let z = 1.0 / (x * x);
        let series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - z * (105.0 - z * 945.0))));
        normal_log_pdf(x) - (-x).ln() + series.ln()
    }
}

/// `φ(x)/Φ(x)`, the inverse Mills ratio, without underflow for very negative `x`.
#[inline]
pub fn normal_hazard_lower(x: f64) -> f64 {
    if x > -5.0 {
        normal_pdf(x) / normal_cdf(x)
    } else {
        (normal_log_pdf(x) - normal_log_cdf(x)).exp()
    }
}

/// Inverse of the standard normal distribution function.
///
/// Acklam's rational approximation followed by two Halley steps on the `erfc`-based cdf.
/// The lower half is solved directly and the upper half by symmetry, so relative
/// accuracy is kept for tiny tail probabilities.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "normal quantile needs p in (0, 1), got {p}"
        )));
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        if e == 0.0 {
            break;
        }
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}
