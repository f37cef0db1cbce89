//! Scalar distribution laws: CDF, quantile, density, and seeded sampling.
//!
//! Continuous laws sample by the inverse-CDF transform of one open-interval uniform
//! (closed-form inverses where they exist, the bracketing solver otherwise), so
//! `sample` and `quantile` agree pathwise by construction. The binomial samples from
//! its exact CDF table; the noncentral t samples by the (Z + delta)/sqrt(V/nu)
//! composition since only its sampler is ever needed.

use crate::error::{Error, Result};
use crate::statkit::real::Real;
use crate::statkit::rng::RngStream;
use crate::statkit::solve::invert_monotone;
use crate::statkit::special::{
    inc_beta, inc_gamma_lower, ln_choose, ln_gamma, norm_cdf, norm_pdf, norm_quantile,
};

/// A parametric law on the real line.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarLaw<R: Real> {
    StdNormal,
    ChiSquare { nu: R },
    Gamma { shape: R, rate: R },
    Binomial { n: u64, p: R },
    Cauchy { loc: R, scale: R },
    StdLaplace,
    Uniform { a: R, b: R },
    StudentT { nu: R, noncentrality: R },
}

use ScalarLaw::*;

impl<R: Real> ScalarLaw<R> {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParameterDomain(msg));
        match *self {
            StdNormal | StdLaplace => Ok(()),
            ChiSquare { nu } => {
                if nu > R::zero() {
                    Ok(())
                } else {
                    bad(format!("chi-square needs nu > 0, got {nu}"))
                }
            }
            Gamma { shape, rate } => {
                if shape > R::zero() && rate > R::zero() {
                    Ok(())
                } else {
                    bad(format!("gamma needs shape, rate > 0, got ({shape}, {rate})"))
                }
            }
            Binomial { n: _, p } => {
                if p >= R::zero() && p <= R::one() {
                    Ok(())
                } else {
                    bad(format!("binomial needs p in [0,1], got {p}"))
                }
            }
            Cauchy { loc: _, scale } => {
                if scale > R::zero() {
                    Ok(())
                } else {
                    bad(format!("cauchy needs scale > 0, got {scale}"))
                }
            }
            Uniform { a, b } => {
                if a < b {
                    Ok(())
                } else {
                    bad(format!("uniform needs a < b, got ({a}, {b})"))
                }
            }
            StudentT { nu, .. } => {
                if nu > R::zero() {
                    Ok(())
                } else {
                    bad(format!("student-t needs nu > 0, got {nu}"))
                }
            }
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: R) -> Result<R> {
        self.validate()?;
        Ok(match *self {
            StdNormal => norm_cdf(x),
            ChiSquare { nu } => {
                if x <= R::zero() {
                    R::zero()
                } else {
                    inc_gamma_lower(nu * R::half(), x * R::half())
                }
            }
            Gamma { shape, rate } => {
                if x <= R::zero() {
                    R::zero()
                } else {
                    inc_gamma_lower(shape, rate * x)
                }
            }
            Binomial { n, p } => binomial_cdf(n, p, x),
            Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                R::half() + z.atan() / R::pi()
            }
            StdLaplace => {
                if x < R::zero() {
                    R::half() * x.exp()
                } else {
                    R::one() - R::half() * (-x).exp()
                }
            }
            Uniform { a, b } => ((x - a) / (b - a)).max(R::zero()).min(R::one()),
            StudentT { nu, noncentrality } => {
                if noncentrality != R::zero() {
                    return Err(Error::Unsupported(
                        "noncentral student-t cdf (only sampling is provided)".into(),
                    ));
                }
                student_t_cdf(nu, x)
            }
        })
    }

    /// Density (or pmf at integer points for the binomial).
    pub fn pdf(&self, x: R) -> Result<R> {
        self.validate()?;
        Ok(match *self {
            StdNormal => norm_pdf(x),
            ChiSquare { nu } => {
                if x <= R::zero() {
                    R::zero()
                } else {
                    let a = nu * R::half();
                    ((a - R::one()) * x.ln() - x * R::half()
                        - ln_gamma(a)
                        - a * R::two().ln())
                    .exp()
                }
            }
            Gamma { shape, rate } => {
                if x <= R::zero() {
                    R::zero()
                } else {
                    (shape * rate.ln() + (shape - R::one()) * x.ln() - rate * x
                        - ln_gamma(shape))
                    .exp()
                }
            }
            Binomial { n, p } => {
                let k = x.as_f64().round();
                if k < 0.0 || k > n as f64 || (k - x.as_f64()).abs() > 1e-9 {
                    R::zero()
                } else {
                    binomial_pmf(n, p, k as u64)
                }
            }
            Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                R::one() / (R::pi() * scale * (R::one() + z * z))
            }
            StdLaplace => R::half() * (-x.abs()).exp(),
            Uniform { a, b } => {
                if x >= a && x <= b {
                    R::one() / (b - a)
                } else {
                    R::zero()
                }
            }
            StudentT { nu, noncentrality } => {
                if noncentrality != R::zero() {
                    return Err(Error::Unsupported(
                        "noncentral student-t density (only sampling is provided)".into(),
                    ));
                }
                let half = R::half();
                (ln_gamma((nu + R::one()) * half) - ln_gamma(nu * half)
                    - half * (nu * R::pi()).ln()
                    - (nu + R::one()) * half * (x * x / nu).ln_1p())
                .exp()
            }
        })
    }

    /// Quantile; continuous laws only, accurate to 1e-9 on the probability scale.
    pub fn quantile(&self, u: R) -> Result<R> {
        self.validate()?;
        if !(u > R::zero() && u < R::one()) {
            return Err(Error::Domain(format!("quantile needs u in (0,1), got {u}")));
        }
        let tol = R::of(1e-9);
        Ok(match *self {
            StdNormal => norm_quantile(u),
            Cauchy { loc, scale } => loc + scale * (R::pi() * (u - R::half())).tan(),
            StdLaplace => {
                if u < R::half() {
                    (R::two() * u).ln()
                } else {
                    -(R::two() * (R::one() - u)).ln()
                }
            }
            Uniform { a, b } => a + (b - a) * u,
            ChiSquare { nu } => {
                let hi = nu + R::of(10.0) * (R::two() * nu).sqrt() + R::of(10.0);
                let pdf = |x: R| self.pdf(x).unwrap_or(R::zero());
                invert_monotone(
                    |x| inc_gamma_lower(nu * R::half(), x.max(R::zero()) * R::half()),
                    u,
                    R::zero(),
                    hi,
                    Some(&pdf),
                    tol,
                )
                .max(R::zero())
            }
            Gamma { shape, rate } => {
                let hi = (shape + R::of(10.0) * shape.sqrt() + R::of(10.0)) / rate;
                let pdf = |x: R| self.pdf(x).unwrap_or(R::zero());
                invert_monotone(
                    |x| inc_gamma_lower(shape, rate * x.max(R::zero())),
                    u,
                    R::zero(),
                    hi,
                    Some(&pdf),
                    tol,
                )
                .max(R::zero())
            }
            StudentT { nu, noncentrality } => {
                if noncentrality != R::zero() {
                    return Err(Error::Unsupported(
                        "noncentral student-t quantile (only sampling is provided)".into(),
                    ));
                }
                let z = norm_quantile(u).abs();
                let w = (z * R::of(3.0) + R::of(5.0)) * R::of(3.0);
                let pdf = |x: R| self.pdf(x).unwrap_or(R::zero());
                invert_monotone(|x| student_t_cdf(nu, x), u, -w, w, Some(&pdf), tol)
            }
            Binomial { .. } => {
                return Err(Error::Unsupported("quantile of a discrete law".into()))
            }
        })
    }

    /// One draw; deterministic in the stream state.
    pub fn draw(&self, rng: &mut RngStream) -> Result<R> {
        self.validate()?;
        Ok(match *self {
            StudentT { nu, noncentrality } if noncentrality != R::zero() => {
                // (Z + delta) / sqrt(V/nu), V ~ chi-square(nu).
                let z = norm_quantile::<R>(R::of(rng.uniform()));
                let v: R = ChiSquare { nu }.quantile(R::of(rng.uniform()))?;
                (z + noncentrality) / (v / nu).sqrt()
            }
            Binomial { n, p } => {
                // Inverse-CDF walk over the exact pmf.
                let u = R::of(rng.uniform());
                let mut acc = R::zero();
                let mut k = 0u64;
                while k < n {
                    acc += binomial_pmf(n, p, k);
                    if u <= acc {
                        break;
                    }
                    k += 1;
                }
                R::of(k as f64)
            }
            _ => self.quantile(R::of(rng.uniform()))?,
        })
    }

    /// `count` draws from the stream.
    pub fn sample(&self, rng: &mut RngStream, count: usize) -> Result<Vec<R>> {
        self.validate()?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.draw(rng)?);
        }
        Ok(out)
    }
}

/// Central student-t CDF via the incomplete beta function.
fn student_t_cdf<R: Real>(nu: R, t: R) -> R {
    if t == R::zero() {
        return R::half();
    }
    let x = nu / (nu + t * t);
    let tail = R::half() * inc_beta(nu * R::half(), R::half(), x);
    if t > R::zero() {
        R::one() - tail
    } else {
        tail
    }
}

pub fn binomial_pmf<R: Real>(n: u64, p: R, k: u64) -> R {
    if p == R::zero() {
        return if k == 0 { R::one() } else { R::zero() };
    }
    if p == R::one() {
        return if k == n { R::one() } else { R::zero() };
    }
    (ln_choose::<R>(n, k) + R::of(k as f64) * p.ln()
        + R::of((n - k) as f64) * (R::one() - p).ln())
    .exp()
}

/// Exact binomial CDF by direct pmf summation.
pub fn binomial_cdf<R: Real>(n: u64, p: R, x: R) -> R {
    if x < R::zero() {
        return R::zero();
    }
    let kmax = x.floor().as_f64() as u64;
    if kmax >= n {
        return R::one();
    }
    let mut acc = R::zero();
    for k in 0..=kmax {
        acc += binomial_pmf(n, p, k);
    }
    acc.min(R::one())
}
