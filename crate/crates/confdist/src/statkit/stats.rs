//! Empirical-distribution utilities: order statistics, empirical CDF and quantiles,
//! Kolmogorov-Smirnov distances, and robust scale estimates.

use crate::statkit::numeric::upper_bound;
use crate::statkit::real::Real;

/// Ascending sort for float slices (inputs must be NaN-free).
pub fn sort<R: Real>(xs: &mut [R]) {
    debug_assert!(xs.iter().all(|x| !x.is_nan()));
    xs.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
}

pub fn mean<R: Real>(xs: &[R]) -> R {
    let mut s = R::zero();
    for &x in xs {
        s += x;
    }
    s / R::of(xs.len() as f64)
}

/// Unbiased (n-1) standard deviation.
pub fn sd<R: Real>(xs: &[R]) -> R {
    let m = mean(xs);
    let mut s = R::zero();
    for &x in xs {
        s += (x - m) * (x - m);
    }
    (s / R::of((xs.len() - 1) as f64)).sqrt()
}

/// Type-7 (linear interpolation of order statistics) quantile of a sorted slice.
pub fn quantile_sorted<R: Real>(sorted: &[R], u: R) -> R {
    let n = sorted.len();
    assert!(n >= 1);
    let h = R::of((n - 1) as f64) * u;
    let i = h.floor().as_f64() as usize;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - h.floor();
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

pub fn median_sorted<R: Real>(sorted: &[R]) -> R {
    quantile_sorted(sorted, R::half())
}

pub fn median<R: Real>(xs: &[R]) -> R {
    let n = xs.len();
    assert!(n >= 1);
    if n > 64 {
        let mut v = xs.to_vec();
        sort(&mut v);
        return median_sorted(&v);
    }
    // Selection on a stack buffer: rejection engines take the median of every
    // simulated dataset, so this path must not sort or allocate.
    let mut buf = [R::zero(); 64];
    let b = &mut buf[..n];
    b.copy_from_slice(xs);
    let h = R::of((n - 1) as f64) * R::half();
    let i = h.floor().as_f64() as usize;
    let (_, lo, rest) = b.select_nth_unstable_by(i, |a, b| a.partial_cmp(b).expect("NaN in sample"));
    let a = *lo;
    if i + 1 >= n {
        return a;
    }
    let mut next = rest[0];
    for &x in &rest[1..] {
        if x < next {
            next = x;
        }
    }
    let frac = h - h.floor();
    a + frac * (next - a)
}

/// Median absolute deviation (unscaled).
pub fn mad<R: Real>(xs: &[R]) -> R {
    let m = median(xs);
    let dev: Vec<R> = xs.iter().map(|&x| (x - m).abs()).collect();
    median(&dev)
}

/// Right-continuous empirical CDF of a sorted sample.
pub fn ecdf_sorted<R: Real>(sorted: &[R], x: R) -> R {
    R::of(upper_bound(sorted, x) as f64) / R::of(sorted.len() as f64)
}

/// KS distance between a sorted sample and an analytic CDF.
pub fn ks_vs_cdf<R: Real>(sorted: &[R], cdf: impl Fn(R) -> R) -> R {
    let n = R::of(sorted.len() as f64);
    let mut d = R::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = R::of(i as f64) / n;
        let hi = R::of((i + 1) as f64) / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// KS distance between a sample of probabilities and the standard uniform.
pub fn ks_uniform<R: Real>(values: &[R]) -> R {
    let mut v = values.to_vec();
    sort(&mut v);
    ks_vs_cdf(&v, |x| x.max(R::zero()).min(R::one()))
}

/// Two-sample KS distance between sorted samples. Ties across samples advance both
/// empirical CDFs together (the sup is over x, evaluated after each jump).
pub fn ks_two_sample_sorted<R: Real>(a: &[R], b: &[R]) -> R {
    let (na, nb) = (R::of(a.len() as f64), R::of(b.len() as f64));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = R::zero();
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        let fa = R::of(i as f64) / na;
        let fb = R::of(j as f64) / nb;
        d = d.max((fa - fb).abs());
    }
    d
}

pub fn ks_two_sample<R: Real>(a: &[R], b: &[R]) -> R {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort(&mut a);
    sort(&mut b);
    ks_two_sample_sorted(&a, &b)
}
