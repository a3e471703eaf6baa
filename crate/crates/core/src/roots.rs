//! Scalar root finding used by the equilibrium solvers.

/// Bisection on `[lo, hi]`. Returns `None` when the end values do not
/// bracket a root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || (hi - lo).abs() < tol {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Walks from `start` towards `end` in `steps` equal increments and returns
/// the first sub-interval `(a, b)` (ordered as walked) across which `f`
/// changes sign.
pub fn first_sign_change<F: Fn(f64) -> f64>(f: &F, start: f64, end: f64, steps: usize) -> Option<(f64, f64)> {
    let dx = (end - start) / steps as f64;
    let mut a = start;
    let mut fa = f(a);
    if fa == 0.0 {
        return Some((a, a));
    }
    for i in 1..=steps {
        let b = if i == steps { end } else { start + dx * i as f64 };
        let fb = f(b);
        if fb == 0.0 || fb.signum() != fa.signum() {
            return Some((a, b));
        }
        a = b;
        fa = fb;
    }
    None
}

/// First root met when walking from `start` to `end`, refined by bisection.
pub fn first_root<F: Fn(f64) -> f64>(f: F, start: f64, end: f64, steps: usize, tol: f64) -> Option<f64> {
    let (a, b) = first_sign_change(&f, start, end, steps)?;
    if a == b {
        return Some(a);
    }
    bisect(&f, a.min(b), a.max(b), tol, 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn first_root_walks_in_order() {
        // roots at 1, 2, 3
        let f = |x: f64| (x - 1.0) * (x - 2.0) * (x - 3.0);
        let from_top = first_root(f, 3.5, 0.0, 70, 1e-12).unwrap();
        assert!((from_top - 3.0).abs() < 1e-9);
        let from_bottom = first_root(f, 0.0, 3.5, 70, 1e-12).unwrap();
        assert!((from_bottom - 1.0).abs() < 1e-9);
    }
}
