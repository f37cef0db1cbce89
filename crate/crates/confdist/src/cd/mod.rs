//! The confidence distribution object and its derived inference.
//!
//! A `ConfDist` is a sample-dependent distribution function H on a scalar parameter
//! space: for the observed data it is an ordinary CDF in the parameter, and at the true
//! parameter value its evaluation over repeated samples is standard uniform. Point
//! estimates, intervals of every level, p-values, and data-conditional draws all read
//! off the same object.

mod discrete;
pub mod io;

pub use discrete::{dominance_holds, discrete_interval, DiscreteCDPair};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::statkit::numeric::{lower_bound, upper_bound, Pchip};
use crate::statkit::rng::RngStream;
use crate::statkit::solve::invert_monotone;
use crate::statkit::stats::{ecdf_sorted, quantile_sorted};

/// Shared evaluable curve, the closure form analytic CDs and densities take.
pub type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Two-sided interval at a confidence level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// How a gridded CD's window boundary relates to the parameter space.
///
/// A `Free` boundary is a truncation of an unbounded (or wider) space, so the grid
/// must reach far enough that essentially no confidence mass lies beyond it. A
/// `Hard` boundary is the edge of the parameter space itself (p = 0, sigma^2 = 0),
/// where the CDF may legitimately sit anywhere in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Free,
    Hard,
}

/// Orientation of the one-sided test a CD p-value reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// Null K0: theta >= b. The p-value is the CD mass on the null, 1 - H(b).
    NullGreaterEq,
    /// Complementary orientation, null K0: theta <= b; p-value H(b).
    NullLessEq,
    /// Two-sided: the confidence curve 2 min(H, 1-H) at b.
    TwoSided,
}

enum Repr {
    Analytic {
        cdf: EvalFn,
        density: Option<EvalFn>,
    },
    Gridded {
        theta: Vec<f64>,
        h: Vec<f64>,
        density: Option<Vec<f64>>,
        /// Right-continuous step semantics (rank-statistic CDs) instead of the
        /// shape-preserving cubic.
        step: bool,
        interp: Option<Pchip<f64>>,
    },
    Empirical {
        sorted: Vec<f64>,
    },
}

/// A confidence distribution on a scalar parameter.
pub struct ConfDist {
    repr: Repr,
    support: (f64, f64),
    label: String,
    provenance: String,
}

/// Minimum draw count for the empirical representation.
pub const EMPIRICAL_MIN_DRAWS: usize = 500;

impl ConfDist {
    /// Analytic representation from a CDF closure (and optional density closure).
    pub fn analytic(
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        density: Option<EvalFn>,
        support: (f64, f64),
        label: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Self {
        ConfDist {
            repr: Repr::Analytic {
                cdf: Arc::new(cdf),
                density,
            },
            support,
            label: label.into(),
            provenance: provenance.into(),
        }
    }

    /// Gridded representation over strictly increasing knots with nondecreasing CDF
    /// values in [0,1]. `step` selects right-continuous step evaluation.
    ///
    /// Smooth grids must cover the confidence mass: H <= 0.001 at a `Free` lower
    /// boundary and H >= 0.999 at a `Free` upper one. Step grids are exempt (their
    /// producers place knots exactly at the jumps).
    pub fn from_grid(
        theta: Vec<f64>,
        h: Vec<f64>,
        density: Option<Vec<f64>>,
        step: bool,
        edges: (Edge, Edge),
        label: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if theta.len() < 2 || theta.len() != h.len() {
            return Err(Error::Grid(format!(
                "need matching grids of at least 2 points, got {} / {}",
                theta.len(),
                h.len()
            )));
        }
        if !theta.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Grid("theta grid must be strictly increasing".into()));
        }
        if h.iter().any(|&v| !((-1e-9..=1.0 + 1e-9).contains(&v)) || v.is_nan()) {
            return Err(Error::Grid("CDF values must lie in [0,1]".into()));
        }
        if h.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::Grid("CDF values must be nondecreasing".into()));
        }
        let h: Vec<f64> = {
            // Clamp round-off and enforce exact monotonicity for the interpolator.
            let mut fixed = Vec::with_capacity(h.len());
            let mut prev = 0.0f64;
            for &v in &h {
                let v = v.clamp(0.0, 1.0).max(prev);
                fixed.push(v);
                prev = v;
            }
            fixed
        };
        if let Some(d) = &density {
            if d.len() != theta.len() {
                return Err(Error::Grid("density grid length mismatch".into()));
            }
            if d.iter().any(|&v| v < 0.0 || v.is_nan()) {
                return Err(Error::Grid("density values must be nonnegative".into()));
            }
        }
        if !step {
            if edges.0 == Edge::Free && h[0] > 0.001 {
                return Err(Error::Grid(format!(
                    "window misses lower mass: H at first knot is {} > 0.001",
                    h[0]
                )));
            }
            if edges.1 == Edge::Free && h[h.len() - 1] < 0.999 {
                return Err(Error::Grid(format!(
                    "window misses upper mass: H at last knot is {} < 0.999",
                    h[h.len() - 1]
                )));
            }
        }
        let support = (theta[0], theta[theta.len() - 1]);
        let interp = if step {
            None
        } else {
            Some(Pchip::new(theta.clone(), h.clone()))
        };
        Ok(ConfDist {
            repr: Repr::Gridded {
                theta,
                h,
                density,
                step,
                interp,
            },
            support,
            label: label.into(),
            provenance: provenance.into(),
        })
    }

    /// Empirical representation over draws of a CD-random variable.
    pub fn empirical(
        mut draws: Vec<f64>,
        label: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if draws.len() < EMPIRICAL_MIN_DRAWS {
            return Err(Error::InsufficientData(format!(
                "empirical CD needs at least {EMPIRICAL_MIN_DRAWS} draws, got {}",
                draws.len()
            )));
        }
        if draws.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite draw".into()));
        }
        crate::statkit::stats::sort(&mut draws);
        if draws[draws.len() - 1] - draws[0] <= 0.0 {
            return Err(Error::DegenerateSample(
                "all draws identical; the draw set carries no spread".into(),
            ));
        }
        let support = (draws[0], draws[draws.len() - 1]);
        Ok(ConfDist {
            repr: Repr::Empirical { sorted: draws },
            support,
            label: label.into(),
            provenance: provenance.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Parameter support window (possibly infinite for analytic CDs).
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn is_step(&self) -> bool {
        matches!(self.repr, Repr::Gridded { step: true, .. })
    }

    /// H(theta), clamped to [0,1]; evaluations beyond the support clamp to 0/1.
    pub fn eval(&self, theta: f64) -> f64 {
        let v = match &self.repr {
            Repr::Analytic { cdf, .. } => cdf(theta),
            Repr::Gridded {
                theta: knots,
                h,
                step,
                interp,
                ..
            } => {
                if *step {
                    // Right-continuous: value of the last knot at or below theta.
                    if theta < knots[0] {
                        0.0
                    } else {
                        let i = upper_bound(knots, theta);
                        h[i - 1]
                    }
                } else {
                    interp.as_ref().expect("smooth grid").eval(theta)
                }
            }
            Repr::Empirical { sorted } => ecdf_sorted(sorted, theta),
        };
        v.clamp(0.0, 1.0)
    }

    /// Confidence density h(theta): the analytic/stored density when available, a
    /// centered finite difference of H otherwise.
    pub fn density(&self, theta: f64) -> Result<f64> {
        match &self.repr {
            Repr::Analytic { density, cdf } => {
                if let Some(d) = density {
                    Ok(d(theta).max(0.0))
                } else {
                    let h = 1e-5;
                    Ok(((cdf(theta + h) - cdf(theta - h)) / (2.0 * h)).max(0.0))
                }
            }
            Repr::Gridded {
                theta: knots,
                density,
                step,
                ..
            } => {
                if *step {
                    return Err(Error::Unsupported(
                        "density of a step-function CD".into(),
                    ));
                }
                if let Some(d) = density {
                    // Interpolate stored density linearly between knots.
                    if theta <= knots[0] || theta >= knots[knots.len() - 1] {
                        let edge = if theta <= knots[0] { 0 } else { d.len() - 1 };
                        return Ok(d[edge]);
                    }
                    let j = upper_bound(knots, theta) - 1;
                    let w = (theta - knots[j]) / (knots[j + 1] - knots[j]);
                    return Ok((d[j] * (1.0 - w) + d[j + 1] * w).max(0.0));
                }
                let spacing = (knots[knots.len() - 1] - knots[0]) / (knots.len() - 1) as f64;
                let h = (1e-4 * spacing).max(1e-5);
                Ok(((self.eval(theta + h) - self.eval(theta - h)) / (2.0 * h)).max(0.0))
            }
            Repr::Empirical { sorted } => {
                // The constructor guarantees >= EMPIRICAL_MIN_DRAWS draws.
                let spacing =
                    (sorted[sorted.len() - 1] - sorted[0]) / (sorted.len() - 1) as f64;
                let h = (1e-1 * spacing).max(1e-5);
                Ok(((self.eval(theta + h) - self.eval(theta - h)) / (2.0 * h)).max(0.0))
            }
        }
    }

    /// Confidence curve CV(theta) = 2 min(H, 1-H).
    pub fn curve(&self, theta: f64) -> f64 {
        let h = self.eval(theta);
        2.0 * h.min(1.0 - h)
    }

    /// H^{-1}(u) for u in (0,1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) || u == 0.0 || u == 1.0 {
            return Err(Error::Domain(format!("quantile needs u in (0,1), got {u}")));
        }
        Ok(match &self.repr {
            Repr::Analytic { cdf, .. } => {
                let (lo, hi) = self.support;
                let (mut a, mut b) = (lo, hi);
                if !a.is_finite() || !b.is_finite() {
                    // Seed a finite bracket; the solver expands it as needed.
                    let c = if a.is_finite() {
                        a + 1.0
                    } else if b.is_finite() {
                        b - 1.0
                    } else {
                        0.0
                    };
                    a = c - 1.0;
                    b = c + 1.0;
                    if lo.is_finite() {
                        a = lo;
                    }
                    if hi.is_finite() {
                        b = hi;
                    }
                }
                invert_monotone(|x| cdf(x), u, a, b, None, 1e-12)
            }
            Repr::Gridded {
                theta: knots,
                h,
                step,
                interp,
                ..
            } => {
                if *step {
                    // Generalized inverse: first knot with H >= u.
                    let i = lower_bound(h, u).min(knots.len() - 1);
                    knots[i]
                } else {
                    let i = lower_bound(h, u);
                    if i == 0 {
                        knots[0]
                    } else if i >= knots.len() {
                        knots[knots.len() - 1]
                    } else {
                        let p = interp.as_ref().expect("smooth grid");
                        let tol = 1e-8 * (self.support.1 - self.support.0);
                        bisect_interp(p, u, knots[i - 1], knots[i], tol)
                    }
                }
            }
            Repr::Empirical { sorted } => quantile_sorted(sorted, u),
        })
    }

    /// Central interval from the alpha/2 and 1-alpha/2 CD quantiles.
    pub fn interval(&self, level: f64) -> Result<Interval> {
        if !(0.0 < level && level < 1.0) {
            return Err(Error::Domain(format!("level must be in (0,1), got {level}")));
        }
        let alpha = 1.0 - level;
        Ok(Interval {
            lo: self.quantile(alpha / 2.0)?,
            hi: self.quantile(1.0 - alpha / 2.0)?,
            level,
        })
    }

    /// CD p-value for testing against `b` under the given alternative.
    pub fn pvalue(&self, b: f64, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::NullGreaterEq => 1.0 - self.eval(b),
            Alternative::NullLessEq => self.eval(b),
            Alternative::TwoSided => self.curve(b),
        }
    }

    /// Data-conditional random variable distributed per this CD.
    pub fn rv(&self, stream: RngStream) -> CdRandomVariable<'_> {
        CdRandomVariable { cd: self, stream }
    }

    /// Sorted draws, when the representation is empirical.
    pub fn empirical_draws(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Empirical { sorted } => Some(sorted),
            _ => None,
        }
    }

    /// Grid knots and CDF values, when the representation is gridded.
    pub fn grid(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Gridded { theta, h, .. } => Some((theta, h)),
            _ => None,
        }
    }
}

impl Clone for ConfDist {
    fn clone(&self) -> Self {
        let repr = match &self.repr {
            Repr::Analytic { cdf, density } => Repr::Analytic {
                cdf: Arc::clone(cdf),
                density: density.as_ref().map(Arc::clone),
            },
            Repr::Gridded {
                theta,
                h,
                density,
                step,
                ..
            } => Repr::Gridded {
                theta: theta.clone(),
                h: h.clone(),
                density: density.clone(),
                step: *step,
                interp: if *step {
                    None
                } else {
                    Some(Pchip::new(theta.clone(), h.clone()))
                },
            },
            Repr::Empirical { sorted } => Repr::Empirical {
                sorted: sorted.clone(),
            },
        };
        ConfDist {
            repr,
            support: self.support,
            label: self.label.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

impl std::fmt::Debug for ConfDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConfDist")
            .field("label", &self.label)
            .field("provenance", &self.provenance)
            .field("support", &self.support)
            .finish()
    }
}

/// Bisection on a monotone interpolant within one knot interval.
fn bisect_interp(p: &Pchip<f64>, u: f64, mut a: f64, mut b: f64, tol_x: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol_x.max(f64::EPSILON * (a.abs() + b.abs())) {
            break;
        }
        let mid = 0.5 * (a + b);
        if p.eval(mid) < u {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Draws of the parameter distributed per a CD, conditional on the observed data.
pub struct CdRandomVariable<'a> {
    cd: &'a ConfDist,
    stream: RngStream,
}

impl CdRandomVariable<'_> {
    /// Inverse-CDF transform of uniforms through the CD quantile; deterministic
    /// per the owned stream's seed.
    pub fn draw(&mut self, count: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.cd.quantile(self.stream.uniform())?);
        }
        Ok(out)
    }
}
