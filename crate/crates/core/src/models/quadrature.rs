use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Uses the Richardson-corrected estimate at each accepted leaf. Fails with a numeric
/// error, reporting the achieved error estimate, if some interval still misses its share
/// of the tolerance at the maximum bisection depth.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut worst = 0.0_f64;
    let value = recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut worst);
    if !value.is_finite() {
        return Err(Error::numeric(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    if worst > 0.0 {
        return Err(Error::numeric(format!(
            "adaptive Simpson did not converge on [{a}, {b}]: achieved error {worst:e}, tolerance {tol:e}"
        )));
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *worst = worst.max(delta.abs() / 15.0);
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

/// Composite Simpson rule with `panels` (rounded up to even) equal panels.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = (panels.max(2) + 1) & !1;
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let v = composite_simpson(&|x: f64| x * x, 0.0, 3.0, 10);
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let v = adaptive_simpson(&|x: f64| (-0.5 * x * x).exp(), -12.0, 12.0, 1e-13).unwrap();
        let want = (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - want).abs() < 1e-11, "{v}");
    }

    #[test]
    fn reports_non_convergence() {
        // 1/sqrt(x) is integrable but its singular endpoint defeats Simpson at tight tol.
        let r = adaptive_simpson(&|x: f64| 1.0 / x.max(1e-300).sqrt(), 0.0, 1.0, 1e-15);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
