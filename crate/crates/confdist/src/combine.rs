//! Combining independent confidence distributions across studies.
//!
//! Each study contributes a CD value H_i(theta); a monotone mapping sends
//! the k values through a common quantile function Q and sums them,
//! g_c(u_1, ..., u_k) = Q(u_1) + ... + Q(u_k),
//! and the combined CD references that sum against the law of g_c at
//! independent uniforms: H_c(theta) = G_c(g_c(H_1(theta), ..., H_k(theta))).
//! When every input is an exact CD and studies are independent, each
//! H_i(theta0) is uniform, so H_c(theta0) is uniform again and the
//! combination is itself a CD, concentrated roughly sqrt(k) times tighter.
//!
//! The default Q is the standard double-exponential quantile; the normal
//! quantile is also available and admits a closed-form reference law.
//! Combination is unweighted.

use crate::cd::{ConfDist, Edge};
use crate::error::{Error, Result};
use crate::statkit::numeric::upper_bound;
use crate::statkit::special::{norm_cdf, norm_quantile};
use crate::statkit::RngStream;

/// Quantile function applied to each study CD value before summing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mapping {
    /// Standard double-exponential (Laplace) quantiles. The default; heavier
    /// tails keep a single extreme study from dominating the sum.
    LaplaceQuantileSum,
    /// Standard normal quantiles. The sum of k mapped uniforms is exactly
    /// N(0, k), so the reference law has a closed form.
    NormalQuantileSum,
}

impl Mapping {
    fn quantile(self, u: f64) -> f64 {
        match self {
            Mapping::LaplaceQuantileSum => {
                if u < 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            Mapping::NormalQuantileSum => norm_quantile(u),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mapping::LaplaceQuantileSum => "laplace-quantile-sum",
            Mapping::NormalQuantileSum => "normal-quantile-sum",
        }
    }
}

/// How the reference law G_c of the mapped uniform sum is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GcMethod {
    /// Empirical CDF over `draws` simulated sums, cached at construction.
    MonteCarlo { draws: u64, seed: u64 },
    /// Exact formula; available for the normal mapping only.
    ClosedForm,
}

/// CD values are pushed away from {0, 1} by this much before the quantile
/// mapping; gridded inputs can return exact endpoint values where Q diverges.
pub const CLAMP_EPS: f64 = 1e-12;

/// Default Monte-Carlo resolution for the reference law. The empirical-CDF
/// error O(1/sqrt(M)) is about 7e-4, below anything reported at 3 decimals.
pub const GC_DEFAULT_DRAWS: u64 = 2_000_000;

/// Minimum acceptable Monte-Carlo resolution.
pub const GC_MIN_DRAWS: u64 = 1_000_000;

// Fixed internal seed for the reference-law cache so a combined CD never
// depends on caller RNG state.
const GC_SEED: u64 = 0x6a09_e667_f3bc_c908;

/// Recipe for a combined CD: study count, mapping, reference-law method, and
/// the evaluation grid over the common parameter.
#[derive(Clone, Debug)]
pub struct CombinerSpec {
    pub k: usize,
    pub mapping: Mapping,
    pub gc_method: GcMethod,
    pub grid: Vec<f64>,
}

impl CombinerSpec {
    /// Default recipe: Laplace mapping with the Monte-Carlo reference law at
    /// default resolution and a fixed internal seed.
    pub fn new(k: usize, grid: Vec<f64>) -> Self {
        CombinerSpec {
            k,
            mapping: Mapping::LaplaceQuantileSum,
            gc_method: GcMethod::MonteCarlo {
                draws: GC_DEFAULT_DRAWS,
                seed: GC_SEED,
            },
            grid,
        }
    }

    pub fn with_mapping(mut self, mapping: Mapping) -> Self {
        self.mapping = mapping;
        self
    }

    pub fn with_gc_method(mut self, method: GcMethod) -> Self {
        self.gc_method = method;
        self
    }
}

/// One study entering an unweighted combination.
#[derive(Clone, Debug)]
pub struct StudyInput {
    pub cd: ConfDist,
    pub label: String,
}

impl StudyInput {
    pub fn new(cd: ConfDist, label: impl Into<String>) -> Self {
        StudyInput {
            cd,
            label: label.into(),
        }
    }
}

enum Reference {
    /// Sorted Monte-Carlo draws of the mapped uniform sum.
    Ecdf(Vec<f64>),
    /// Sum of k standard-normal quantiles is N(0, k).
    NormalSum { sd: f64 },
}

/// A validated [`CombinerSpec`] with its reference law built and cached.
/// Construction does the Monte-Carlo work once; combining is then pure.
pub struct Combiner {
    spec: CombinerSpec,
    reference: Reference,
}

impl Combiner {
    pub fn new(spec: CombinerSpec) -> Result<Self> {
        if spec.k < 2 {
            return Err(Error::ParameterDomain(format!(
                "combination needs at least 2 studies, got k = {}",
                spec.k
            )));
        }
        if spec.grid.len() < 2 {
            return Err(Error::Grid(
                "combiner grid needs at least 2 points".into(),
            ));
        }
        if !spec.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Grid(
                "combiner grid must be strictly increasing".into(),
            ));
        }
        let reference = match spec.gc_method {
            GcMethod::ClosedForm => match spec.mapping {
                Mapping::NormalQuantileSum => Reference::NormalSum {
                    sd: (spec.k as f64).sqrt(),
                },
                Mapping::LaplaceQuantileSum => {
                    return Err(Error::Unsupported(
                        "no closed-form reference law for the Laplace quantile sum; \
                         use the Monte-Carlo method"
                            .into(),
                    ))
                }
            },
            GcMethod::MonteCarlo { draws, seed } => {
                if draws < GC_MIN_DRAWS {
                    return Err(Error::ParameterDomain(format!(
                        "Monte-Carlo reference law needs at least {GC_MIN_DRAWS} draws, got {draws}"
                    )));
                }
                let mut stream = RngStream::new(seed);
                let mut sums = Vec::with_capacity(draws as usize);
                for _ in 0..draws {
                    let mut s = 0.0;
                    for _ in 0..spec.k {
                        s += spec.mapping.quantile(stream.uniform());
                    }
                    sums.push(s);
                }
                sums.sort_by(f64::total_cmp);
                Reference::Ecdf(sums)
            }
        };
        Ok(Combiner { spec, reference })
    }

    pub fn spec(&self) -> &CombinerSpec {
        &self.spec
    }

    /// G_c(t): probability that the mapped sum of independent uniforms is <= t.
    pub fn reference_cdf(&self, t: f64) -> f64 {
        match &self.reference {
            Reference::Ecdf(sorted) => upper_bound(sorted, t) as f64 / sorted.len() as f64,
            Reference::NormalSum { sd } => norm_cdf(t / sd),
        }
    }

    /// Combines the k study CDs into one gridded CD on the spec's grid.
    /// The returned flag reports whether any study CD value had to be clamped
    /// away from an exact 0 or 1 before the quantile mapping.
    ///
    /// Each study must evaluate monotonically on the grid, and the grid must
    /// be wide enough that the combined CDF reaches both tails (the gridded-CD
    /// mass window); too narrow a grid is rejected rather than extrapolated.
    pub fn combine(&self, studies: &[StudyInput]) -> Result<(ConfDist, bool)> {
        if studies.len() != self.spec.k {
            return Err(Error::Invalid(format!(
                "spec expects {} studies, got {}",
                self.spec.k,
                studies.len()
            )));
        }
        let grid = &self.spec.grid;
        let mut per_study = Vec::with_capacity(studies.len());
        for s in studies {
            let vals: Vec<f64> = grid.iter().map(|&t| s.cd.eval(t)).collect();
            if vals.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                return Err(Error::Invalid(format!(
                    "study '{}' does not evaluate monotonically on the combiner grid",
                    s.label
                )));
            }
            per_study.push(vals);
        }
        let mut clamped = false;
        let mut us = vec![0.0; studies.len()];
        let mut h = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            for (i, vals) in per_study.iter().enumerate() {
                us[i] = vals[j];
            }
            let (t, cl) = gc_map(&us, self.spec.mapping);
            clamped |= cl;
            h.push(self.reference_cdf(t));
        }
        // The grid edge is the parameter space's own boundary exactly when
        // every study says so; otherwise the mass window must hold.
        let lo = studies
            .iter()
            .map(|s| s.cd.support().0)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = studies
            .iter()
            .map(|s| s.cd.support().1)
            .fold(f64::INFINITY, f64::min);
        let edges = (
            if grid[0] <= lo { Edge::Hard } else { Edge::Free },
            if grid[grid.len() - 1] >= hi {
                Edge::Hard
            } else {
                Edge::Free
            },
        );
        let cd = ConfDist::from_grid(
            grid.clone(),
            h,
            None,
            false,
            edges,
            "combined",
            format!(
                "{} combination of {} study CDs",
                self.spec.mapping.name(),
                studies.len()
            ),
        )?;
        Ok((cd, clamped))
    }
}

/// Maps CD values through the chosen quantile function and sums them.
///
/// Values are clamped into [`CLAMP_EPS`, 1 - `CLAMP_EPS`] first; the returned
/// flag reports whether any clamping happened. The mapped quantiles are summed
/// in sorted order, so permuting the inputs reproduces the result bit for bit.
pub fn gc_map(us: &[f64], mapping: Mapping) -> (f64, bool) {
    let mut clamped = false;
    let mut qs: Vec<f64> = us
        .iter()
        .map(|&u| {
            let c = u.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
            if c != u {
                clamped = true;
            }
            mapping.quantile(c)
        })
        .collect();
    qs.sort_by(f64::total_cmp);
    (qs.iter().sum(), clamped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::normal_mean_cd;
    use crate::statkit::numeric::linspace;
    use crate::statkit::stats::ks_uniform;
    use approx::assert_abs_diff_eq;

    fn normal_sample(stream: &mut RngStream, n: usize, mu: f64) -> Vec<f64> {
        (0..n).map(|_| mu + norm_quantile(stream.uniform())).collect()
    }

    #[test]
    fn gc_map_matches_quantile_arithmetic() {
        let (s, cl) = gc_map(&[0.5, 0.5, 0.5, 0.5], Mapping::LaplaceQuantileSum);
        assert_eq!(s, 0.0);
        assert!(!cl);

        let (s, _) = gc_map(&[0.9], Mapping::LaplaceQuantileSum);
        assert_abs_diff_eq!(s, -(0.2f64.ln()), epsilon = 1e-12);

        // 1 - 0.75 and 0.25 are the same binary number, so the two mapped
        // quantiles cancel exactly.
        let (s, cl) = gc_map(&[0.75, 0.25], Mapping::LaplaceQuantileSum);
        assert_eq!(s, 0.0);
        assert!(!cl);
        let (s, _) = gc_map(&[0.9, 0.1], Mapping::LaplaceQuantileSum);
        assert!(s.abs() < 1e-15);

        // Endpoint inputs clamp near-symmetrically and flag. (Cancellation is
        // inexact: 1 - (1 - 1e-12) re-quantizes on the ulp(1) grid.)
        let (s, cl) = gc_map(&[0.0, 1.0], Mapping::LaplaceQuantileSum);
        assert!(s.abs() < 1e-3, "clamped endpoints summed to {s}");
        assert!(cl);

        let (s, _) = gc_map(&[0.9], Mapping::NormalQuantileSum);
        assert_eq!(s, norm_quantile(0.9));
    }

    #[test]
    fn reference_law_examples() {
        let grid = vec![-1.0, 1.0];
        let mc = Combiner::new(CombinerSpec::new(4, grid.clone())).unwrap();
        assert_abs_diff_eq!(mc.reference_cdf(0.0), 0.5, epsilon = 2e-3);
        assert_eq!(mc.reference_cdf(-1e9), 0.0);
        assert_eq!(mc.reference_cdf(1e9), 1.0);
        let ts = linspace(-10.0, 10.0, 101);
        for w in ts.windows(2) {
            assert!(mc.reference_cdf(w[0]) <= mc.reference_cdf(w[1]));
        }

        // Same spec, fresh build: the cache is deterministic.
        let mc2 = Combiner::new(CombinerSpec::new(4, grid.clone())).unwrap();
        for &t in &[-3.0, -0.7, 0.0, 1.3, 6.0] {
            assert_eq!(mc.reference_cdf(t), mc2.reference_cdf(t));
        }

        let normal = Combiner::new(
            CombinerSpec::new(4, grid.clone())
                .with_mapping(Mapping::NormalQuantileSum)
                .with_gc_method(GcMethod::ClosedForm),
        )
        .unwrap();
        let t = 2.0 * norm_quantile(0.975);
        assert_abs_diff_eq!(normal.reference_cdf(t), 0.975, epsilon = 1e-9);

        assert!(matches!(
            Combiner::new(CombinerSpec::new(4, grid).with_gc_method(GcMethod::ClosedForm)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            Combiner::new(CombinerSpec::new(1, vec![0.0, 1.0])),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            Combiner::new(CombinerSpec::new(2, vec![0.0])),
            Err(Error::Grid(_))
        ));
        assert!(matches!(
            Combiner::new(CombinerSpec::new(2, vec![0.0, 0.0, 1.0])),
            Err(Error::Grid(_))
        ));
        assert!(matches!(
            Combiner::new(CombinerSpec::new(2, vec![0.0, 1.0]).with_gc_method(
                GcMethod::MonteCarlo {
                    draws: 1000,
                    seed: 7
                }
            )),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn identical_studies_keep_the_common_median() {
        let mut stream = RngStream::new(0x10ca);
        let y = normal_sample(&mut stream, 25, 1.3);
        let ybar = y.iter().sum::<f64>() / y.len() as f64;
        let cd = normal_mean_cd(&y).unwrap();

        // Narrow enough that no study value reaches the clamp band.
        let grid = linspace(ybar - 1.0, ybar + 1.0, 401);
        let step = grid[1] - grid[0];
        let comb = Combiner::new(CombinerSpec::new(2, grid)).unwrap();
        let studies = [
            StudyInput::new(cd.clone(), "a"),
            StudyInput::new(cd.clone(), "b"),
        ];
        let (combined, clamped) = comb.combine(&studies).unwrap();
        assert!(!clamped);
        assert_abs_diff_eq!(combined.quantile(0.5).unwrap(), ybar, epsilon = step);

        // A wider window pushes the study CDs below the clamp at the edges.
        let grid = linspace(ybar - 2.0, ybar + 2.0, 401);
        let comb = Combiner::new(CombinerSpec::new(2, grid)).unwrap();
        let (_, clamped) = comb.combine(&studies).unwrap();
        assert!(clamped);
    }

    #[test]
    fn permutation_symmetry_is_exact() {
        let mut stream = RngStream::new(0x5e11);
        let a = StudyInput::new(
            normal_mean_cd(&normal_sample(&mut stream, 18, 0.4)).unwrap(),
            "a",
        );
        let b = StudyInput::new(
            normal_mean_cd(&normal_sample(&mut stream, 31, 0.1)).unwrap(),
            "b",
        );
        let c = StudyInput::new(
            normal_mean_cd(&normal_sample(&mut stream, 24, -0.2)).unwrap(),
            "c",
        );
        let grid = linspace(-2.0, 2.0, 301);
        let comb = Combiner::new(CombinerSpec::new(3, grid)).unwrap();
        let (h1, _) = comb
            .combine(&[a.clone(), b.clone(), c.clone()])
            .unwrap();
        let (h2, _) = comb.combine(&[c, a, b]).unwrap();
        for &t in &[-1.8, -0.9, -0.3, 0.0, 0.25, 0.8, 1.7] {
            assert_eq!(h1.eval(t), h2.eval(t));
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let grid = linspace(-3.0, 3.0, 101);
        let comb = Combiner::new(CombinerSpec::new(2, grid)).unwrap();

        let wobble = ConfDist::analytic(
            |t| 0.5 + 0.45 * t.sin(),
            None,
            (f64::NEG_INFINITY, f64::INFINITY),
            "wobble",
            "test",
        );
        let ok = ConfDist::analytic(
            norm_cdf,
            None,
            (f64::NEG_INFINITY, f64::INFINITY),
            "normal",
            "test",
        );
        assert!(matches!(
            comb.combine(&[
                StudyInput::new(wobble, "w"),
                StudyInput::new(ok.clone(), "ok")
            ]),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            comb.combine(&[StudyInput::new(ok, "ok")]),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn combined_value_at_truth_stays_uniform() {
        // k independent exact CDs at a common truth: H_c(theta0) ~ U(0,1).
        let k = 4;
        let n = 20;
        let reps = 2000;
        let theta0 = 0.0;
        let grid = linspace(-4.0, 4.0, 201);
        let comb = Combiner::new(CombinerSpec::new(k, grid)).unwrap();
        let root = RngStream::new(0xb1a5);
        let mut pits = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut stream = root.substream(r as u64);
            let studies: Vec<StudyInput> = (0..k)
                .map(|i| {
                    let y = normal_sample(&mut stream, n, theta0);
                    StudyInput::new(normal_mean_cd(&y).unwrap(), format!("s{i}"))
                })
                .collect();
            let (combined, _) = comb.combine(&studies).unwrap();
            pits.push(combined.eval(theta0));
        }
        let ks = ks_uniform(&pits);
        assert!(ks < 0.031, "KS distance {ks} too large for uniformity");
    }

    #[test]
    fn combined_interval_beats_every_individual() {
        let k = 4;
        let n = 50;
        let reps = 500;
        let grid = linspace(-1.5, 1.5, 401);
        let comb = Combiner::new(CombinerSpec::new(k, grid)).unwrap();
        let root = RngStream::new(0xeff1);
        let mut wins = 0;
        for r in 0..reps {
            let mut stream = root.substream(r as u64);
            let cds: Vec<ConfDist> = (0..k)
                .map(|_| normal_mean_cd(&normal_sample(&mut stream, n, 0.0)).unwrap())
                .collect();
            let best = cds
                .iter()
                .map(|cd| cd.interval(0.95).unwrap().width())
                .fold(f64::INFINITY, f64::min);
            let studies: Vec<StudyInput> = cds
                .into_iter()
                .map(|cd| StudyInput::new(cd, "s"))
                .collect();
            let (combined, _) = comb.combine(&studies).unwrap();
            if combined.interval(0.95).unwrap().width() < best {
                wins += 1;
            }
        }
        assert!(
            wins >= 495,
            "combined interval shorter in only {wins}/{reps} runs"
        );
    }
}
