//! Bracketed scalar root finding (Illinois false position with bisection
//! fallback) for the monotone residuals of the thermal network.

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo) < 0 < f(hi)`.
///
/// Non-finite residuals are treated as "too low" at the lower end and
/// force a bisection step. Stops when the bracket collapses to a few ulps
/// or `|f| <= f_tol`.
pub(crate) fn illinois<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, f_tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() || f_lo > 0.0 || f_hi < 0.0 {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let interpolate = f_lo.is_finite() && f_hi.is_finite() && f_hi != f_lo;
        let mut x = if interpolate { hi - f_hi * (hi - lo) / (f_hi - f_lo) } else { 0.5 * (lo + hi) };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx.abs() <= f_tol || (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
            return Some(x);
        }
        if fx.is_nan() || fx < 0.0 {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if f_lo.is_nan() {
            f_lo = f64::NEG_INFINITY;
        }
    }
    Some(0.5 * (lo + hi))
}
