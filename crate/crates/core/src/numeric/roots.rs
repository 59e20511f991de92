//! Bracketing root finders.

/// Bisection on a bracket `[a, b]` whose endpoint values have opposite signs
/// (or one of which is zero).
///
/// Stops when `|f(mid)| <= f_tol` or the bracket is narrower than `x_tol`.
/// Returns `None` when the bracket does not straddle a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, f_tol: f64, x_tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm.abs() <= f_tol || (b - a).abs() <= x_tol || mid == a || mid == b {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Locates the boundary between two points carrying different discrete labels.
///
/// `label(a) != label(b)` is assumed; returns the midpoint of the final bracket
/// once it is narrower than `x_tol`.
pub fn bisect_label<L: PartialEq, F: Fn(f64) -> L>(label: F, mut a: f64, mut b: f64, x_tol: f64) -> f64 {
    let la = label(a);
    while (b - a) > x_tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if label(mid) == la {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
