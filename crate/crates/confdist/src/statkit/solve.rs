//! Root bracketing and scalar minimization used by quantile inversion, grid
//! construction, and the fiducial argmin engine.

use crate::statkit::real::Real;

/// Solve f(x) = target for a nondecreasing f on an expandable bracket.
///
/// Bisection carries the bracket; whenever a derivative is supplied, a Newton step is
/// tried first and kept only if it stays inside the bracket. Terminates when the
/// residual on the f-scale drops below `tol_f` (plus a floor on bracket width).
pub fn invert_monotone<R: Real>(
    f: impl Fn(R) -> R,
    target: R,
    mut lo: R,
    mut hi: R,
    dfdx: Option<&dyn Fn(R) -> R>,
    tol_f: R,
) -> R {
    debug_assert!(lo < hi);
    // Expand until the bracket straddles the target (at most ~120 doublings).
    let mut flo = f(lo);
    let mut fhi = f(hi);
    for _ in 0..120 {
        if flo <= target {
            break;
        }
        let w = hi - lo;
        lo = lo - w;
        flo = f(lo);
    }
    for _ in 0..120 {
        if fhi >= target {
            break;
        }
        let w = hi - lo;
        hi = hi + w;
        fhi = f(hi);
    }

    let mut x = (lo + hi) * R::half();
    for _ in 0..200 {
        let fx = f(x);
        if (fx - target).abs() <= tol_f {
            return x;
        }
        if fx < target {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= (lo.abs() + hi.abs() + R::one()) * R::epsilon() {
            return (lo + hi) * R::half();
        }
        let mut next = (lo + hi) * R::half();
        if let Some(d) = dfdx {
            let slope = d(x);
            if slope > R::zero() {
                let cand = x - (fx - target) / slope;
                if cand > lo && cand < hi {
                    next = cand;
                }
            }
        }
        x = next;
    }
    x
}

/// Golden-section minimization of a unimodal f on [a, b], followed by one parabolic
/// refinement through the final bracket. Returns (argmin, min).
pub fn golden_min<R: Real>(f: impl Fn(R) -> R, mut a: R, mut b: R, tol_x: R) -> (R, R) {
    debug_assert!(a < b);
    let inv_phi = R::of(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if b - a <= tol_x {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    // Parabola through (a, x_mid, b) where x_mid is the better interior point.
    let (xm, fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let (fa, fb) = (f(a), f(b));
    let denom = (xm - a) * (fm - fb) - (xm - b) * (fm - fa);
    if denom.abs() > R::zero() {
        let num = (xm - a) * (xm - a) * (fm - fb) - (xm - b) * (xm - b) * (fm - fa);
        let cand = xm - R::half() * num / denom;
        if cand > a && cand < b {
            let fc = f(cand);
            if fc < fm {
                return (cand, fc);
            }
        }
    }
    (xm, fm)
}
