//! Bracketing root finders shared by the fixed-point and bifurcation modules.

use crate::error::{Error, Result};

/// Width at which [`bisect`] stops.
pub const BISECTION_TOL: f64 = 1e-12;
/// Hard cap on bisection steps.
pub const BISECTION_MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]`. `f(lo)` and `f(hi)` must differ in sign (or one
/// of them must vanish).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }

    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Splits `[lo, hi]` into `n` equal cells and returns every cell whose
/// endpoint values differ strictly in sign. A grid node where `f` is exactly
/// zero is returned as the degenerate bracket `(x, x)`.
pub fn scan_brackets<F>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = if i == n { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fb == 0.0 && i < n {
            out.push((b, b));
        } else if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            out.push((a, b));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Scan for sign changes, then bisect each bracket. Roots come back ascending.
pub fn find_all_roots<F>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    scan_brackets(&f, lo, hi, n)
        .into_iter()
        .filter_map(|(a, b)| bisect(&f, a, b, BISECTION_TOL, BISECTION_MAX_ITER).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 200),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn bisect_endpoint_root() {
        assert_eq!(bisect(|x| x - 1.0, 1.0, 3.0, 1e-12, 10).unwrap(), 1.0);
    }

    #[test]
    fn scan_finds_all_three_roots() {
        let roots = find_all_roots(|x| (x - 0.1) * (x - 0.5) * (x - 0.9), 0.0, 1.0, 1000);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.1, 0.5, 0.9]) {
            assert!((r - e).abs() < 1e-11);
        }
    }
}
