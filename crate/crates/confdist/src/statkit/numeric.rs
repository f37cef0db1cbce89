//! Quadrature, monotone interpolation, and small grid utilities.

use crate::statkit::real::Real;

/// Composite Simpson rule on a uniform grid (any length >= 2; a trailing trapezoid
/// panel absorbs an even point count).
pub fn simpson_uniform<R: Real>(y: &[R], h: R) -> R {
    let n = y.len();
    assert!(n >= 2);
    let third = R::of(1.0 / 3.0);
    let mut total = R::zero();
    let mut i = 0;
    while i + 2 < n {
        total += (y[i] + R::of(4.0) * y[i + 1] + y[i + 2]) * h * third;
        i += 2;
    }
    if i + 2 == n {
        // One panel left over: trapezoid.
        total += (y[n - 2] + y[n - 1]) * h * R::half();
    }
    total
}

/// Cumulative trapezoid integral evaluated at every grid point (starts at 0).
/// Nonnegative integrands give a nondecreasing result, which CDF construction needs.
pub fn cum_trapezoid<R: Real>(y: &[R], h: R) -> Vec<R> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = R::zero();
    out.push(acc);
    for w in y.windows(2) {
        acc += (w[0] + w[1]) * h * R::half();
        out.push(acc);
    }
    out
}

/// First index i with xs[i] >= t (xs ascending); xs.len() if none.
pub fn lower_bound<R: Real>(xs: &[R], t: R) -> usize {
    let mut lo = 0usize;
    let mut hi = xs.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if xs[mid] < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// First index i with xs[i] > t (xs ascending); xs.len() if none.
pub fn upper_bound<R: Real>(xs: &[R], t: R) -> usize {
    let mut lo = 0usize;
    let mut hi = xs.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if xs[mid] <= t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Uniform grid of `points` values from lo to hi inclusive.
pub fn linspace<R: Real>(lo: R, hi: R, points: usize) -> Vec<R> {
    assert!(points >= 2 && hi > lo);
    let step = (hi - lo) / R::of((points - 1) as f64);
    (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo + step * R::of(i as f64)
            }
        })
        .collect()
}

/// Shape-preserving cubic interpolant (Fritsch-Carlson). Monotone data in, monotone
/// interpolant out: the property gridded CDFs rely on.
pub struct Pchip<R: Real> {
    x: Vec<R>,
    y: Vec<R>,
    m: Vec<R>,
}

impl<R: Real> Pchip<R> {
    pub fn new(x: Vec<R>, y: Vec<R>) -> Self {
        let n = x.len();
        assert!(n >= 2 && n == y.len());
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]), "knots must increase");

        let mut d = Vec::with_capacity(n - 1);
        let mut h = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let hi = x[i + 1] - x[i];
            h.push(hi);
            d.push((y[i + 1] - y[i]) / hi);
        }

        let mut m = vec![R::zero(); n];
        m[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), d[0], *d.get(1).unwrap_or(&d[0]));
        m[n - 1] = endpoint_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            d[n - 2],
            if n >= 3 { d[n - 3] } else { d[n - 2] },
        );
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= R::zero() {
                m[i] = R::zero();
            } else {
                let w1 = R::two() * h[i] + h[i - 1];
                let w2 = h[i] + R::two() * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        Pchip { x, y, m }
    }

    /// Evaluate; clamps to the boundary values outside the knot range.
    pub fn eval(&self, t: R) -> R {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let j = upper_bound(&self.x, t) - 1;
        let h = self.x[j + 1] - self.x[j];
        let s = (t - self.x[j]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = R::two() * s3 - R::of(3.0) * s2 + R::one();
        let h10 = s3 - R::two() * s2 + s;
        let h01 = -R::two() * s3 + R::of(3.0) * s2;
        let h11 = s3 - s2;
        h00 * self.y[j] + h10 * h * self.m[j] + h01 * self.y[j + 1] + h11 * h * self.m[j + 1]
    }

    pub fn knots(&self) -> (&[R], &[R]) {
        (&self.x, &self.y)
    }
}

/// One-sided three-point endpoint slope with the Fritsch-Carlson clamps.
fn endpoint_slope<R: Real>(h0: R, h1: R, d0: R, d1: R) -> R {
    let mut m = ((R::two() * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= R::zero() {
        m = R::zero();
    } else if d0 * d1 <= R::zero() && m.abs() > R::of(3.0) * d0.abs() {
        m = R::of(3.0) * d0;
    }
    m
}
