//! Simulation-based inversion of a structural model Y = G(theta, U).
//!
//! Three engines produce artificial draws theta* whose conditional law,
//! given the observed data, matches (exactly or asymptotically) the sampling
//! law of the estimator error:
//!
//! * bootstrap: resample the data, re-apply the statistic;
//! * fiducial: draw u*, solve theta from y_obs = G(theta, u*) by residual
//!   minimization, keep near-exact solutions;
//! * approximate rejection (ABC): draw theta* from a prior, simulate a
//!   dataset, keep theta* when the summary lands within epsilon of the
//!   observed summary.
//!
//! [`matching_diagnostic`] quantifies the match with a two-sample KS distance
//! against a fresh simulation of the estimator error at a reference theta0,
//! and [`draws_to_cd`] lifts any draw set into an empirical [`ConfDist`].
//!
//! Every engine consumes its stream in attempt order, so a fixed seed and
//! configuration reproduce the draw set byte for byte.

pub mod models;

use std::fs;
use std::path::Path;

use crate::cd::io::fmt_f64;
use crate::cd::ConfDist;
use crate::error::{Error, Result};
use crate::statkit::laws::ScalarLaw;
use crate::statkit::solve::golden_min;
use crate::statkit::stats::{ks_two_sample, mad};
use crate::statkit::RngStream;

/// Attempts before the fiducial engine tests its acceptance rate.
pub const GFI_ATTEMPT_FLOOR: u64 = 1_000_000;
/// Minimum acceptance rate the fiducial engine tolerates at the floor.
pub const GFI_MIN_RATE: f64 = 1e-4;
/// Hard attempt budget for the rejection engine.
pub const ABC_ATTEMPT_CAP: u64 = 10_000_000;
/// Minimum acceptance rate the rejection engine tolerates at the cap.
pub const ABC_MIN_RATE: f64 = 1e-5;
/// Minimum bootstrap replicate count.
pub const BOOTSTRAP_MIN_B: usize = 500;

/// A structural model Y = G(theta, U): a deterministic forward map, a sampler
/// for the noise U, a bounded parameter range, and pure scalar summary,
/// distance, and estimator functions.
pub struct GenerativeModel {
    // Both closures append into a caller-owned buffer: the rejection loop
    // evaluates them millions of times, so per-call allocation is off limits.
    forward: Box<dyn Fn(f64, &[f64], &mut Vec<f64>) + Send + Sync>,
    noise_draw: Box<dyn Fn(&mut RngStream, &mut Vec<f64>) + Send + Sync>,
    noise_label: String,
    theta_space: (f64, f64),
    summary: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    distance: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    estimator: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    n: usize,
    label: String,
}

impl GenerativeModel {
    /// Builds a model with the default distance |t1 - t2| on summaries.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        n: usize,
        theta_space: (f64, f64),
        forward: impl Fn(f64, &[f64], &mut Vec<f64>) + Send + Sync + 'static,
        noise_label: impl Into<String>,
        noise_draw: impl Fn(&mut RngStream, &mut Vec<f64>) + Send + Sync + 'static,
        summary: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        estimator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GenerativeModel {
            forward: Box::new(forward),
            noise_draw: Box::new(noise_draw),
            noise_label: noise_label.into(),
            theta_space,
            summary: Box::new(summary),
            distance: Box::new(|a, b| (a - b).abs()),
            estimator: Box::new(estimator),
            n,
            label: label.into(),
        }
    }

    pub fn with_distance(
        mut self,
        distance: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.distance = Box::new(distance);
        self
    }

    pub fn with_theta_space(mut self, lo: f64, hi: f64) -> Self {
        self.theta_space = (lo, hi);
        self
    }

    pub fn forward_at(&self, theta: f64, u: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.n);
        self.forward_into(theta, u, &mut y);
        y
    }

    /// Appends G(theta, u) into `y` without clearing it first.
    pub fn forward_into(&self, theta: f64, u: &[f64], y: &mut Vec<f64>) {
        (self.forward)(theta, u, y);
    }

    pub fn draw_noise(&self, stream: &mut RngStream) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.n);
        self.draw_noise_into(stream, &mut u);
        u
    }

    /// Appends one noise vector into `u` without clearing it first.
    pub fn draw_noise_into(&self, stream: &mut RngStream, u: &mut Vec<f64>) {
        (self.noise_draw)(stream, u);
    }

    /// One full dataset: fresh noise pushed through the forward map.
    pub fn simulate(&self, theta: f64, stream: &mut RngStream) -> Vec<f64> {
        let u = self.draw_noise(stream);
        self.forward_at(theta, &u)
    }

    pub fn summarize(&self, y: &[f64]) -> f64 {
        (self.summary)(y)
    }

    pub fn estimate(&self, y: &[f64]) -> f64 {
        (self.estimator)(y)
    }

    pub fn dist(&self, a: f64, b: f64) -> f64 {
        (self.distance)(a, b)
    }

    pub fn theta_space(&self) -> (f64, f64) {
        self.theta_space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn noise_label(&self) -> &str {
        &self.noise_label
    }
}

/// Which engine produced a draw set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Bootstrap,
    Gfi,
    Abc,
    CdRv,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Bootstrap => "bootstrap",
            Engine::Gfi => "gfi",
            Engine::Abc => "abc",
            Engine::CdRv => "cd-rv",
        }
    }
}

/// Artificial draws theta* with the engine's bookkeeping.
#[derive(Clone, Debug)]
pub struct InversionDraws {
    pub draws: Vec<f64>,
    pub engine: Engine,
    /// Retained / attempted, recorded by the rejection-flavored engines.
    pub acceptance_rate: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    /// Free-form provenance notes (prior realization, redraw counts, ...).
    pub notes: Vec<String>,
}

/// Outcome of a matching check: the two-sample KS distance between the
/// centered artificial draws and a fresh simulation of the estimator error.
#[derive(Clone, Debug)]
pub struct MatchingReport {
    pub engine: Engine,
    pub n: usize,
    pub ks_distance: f64,
    pub reference: String,
    pub artificial: String,
    /// (reference replications, artificial draws).
    pub replications: (usize, usize),
}

/// Robust spread of a dataset: scaled median absolute deviation.
pub fn robust_scale(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InsufficientData("empty dataset".into()));
    }
    let s = mad(data) * 1.4826;
    if !(s > 0.0) {
        return Err(Error::DegenerateSample(
            "robust scale is zero; the data carry no spread".into(),
        ));
    }
    Ok(s)
}

/// A proper stand-in for a flat prior: uniform on the estimate plus or minus
/// 20 robust scales. Returns the law and a note describing the realization.
pub fn flat_prior(theta_hat: f64, data: &[f64]) -> Result<(ScalarLaw<f64>, String)> {
    let scale = robust_scale(data)?;
    let (a, b) = (theta_hat - 20.0 * scale, theta_hat + 20.0 * scale);
    Ok((
        ScalarLaw::Uniform { a, b },
        format!("flat prior realized as uniform on [{a:.6}, {b:.6}] (estimate +- 20 robust scales)"),
    ))
}

/// Default rejection tolerance: 0.05 * robust scale / sqrt(n).
pub fn default_epsilon(data: &[f64]) -> Result<f64> {
    Ok(0.05 * robust_scale(data)? / (data.len() as f64).sqrt())
}

/// Bootstrap draws: B resamples of the data rows (multinomial, with
/// replacement) with the statistic applied to each. A resample on which the
/// statistic fails (non-finite value) is redrawn; failures are capped at B/10.
pub fn bootstrap_draws(
    data: &[f64],
    statistic: impl Fn(&[f64]) -> f64,
    b: usize,
    stream: &mut RngStream,
) -> Result<InversionDraws> {
    if b < BOOTSTRAP_MIN_B {
        return Err(Error::InsufficientData(format!(
            "bootstrap needs at least {BOOTSTRAP_MIN_B} replicates, got {b}"
        )));
    }
    if data.is_empty() {
        return Err(Error::InsufficientData("empty dataset".into()));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("non-finite observation".into()));
    }
    let n = data.len();
    let cap = b / 10;
    let mut failures = 0usize;
    let mut buf = vec![0.0f64; n];
    let mut draws = Vec::with_capacity(b);
    let seed = stream.seed();
    while draws.len() < b {
        for slot in buf.iter_mut() {
            *slot = data[stream.below(n as u64) as usize];
        }
        let v = statistic(&buf);
        if v.is_finite() {
            draws.push(v);
        } else {
            failures += 1;
            if failures > cap {
                return Err(Error::DegenerateSample(format!(
                    "statistic failed on more than {cap} of {b} resamples"
                )));
            }
        }
    }
    let mut notes = Vec::new();
    if failures > 0 {
        notes.push(format!("{failures} resamples redrawn after statistic failure"));
    }
    Ok(InversionDraws {
        draws,
        engine: Engine::Bootstrap,
        acceptance_rate: None,
        epsilon: None,
        seed,
        notes,
    })
}

// Scalar argmin over [lo, hi]: golden sections from 5 equispaced brackets
// (guards nonconvex residuals), then one parabolic polish of the best point.
fn argmin_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const STARTS: usize = 5;
    let w = (hi - lo) / STARTS as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 0..STARTS {
        let a = lo + i as f64 * w;
        let (x, fx) = golden_min(&f, a, a + w, 1e-8);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    let (x0, f0) = best;
    let h = 1e-7 * (hi - lo).max(1.0);
    let (xl, xr) = ((x0 - h).max(lo), (x0 + h).min(hi));
    let (fl, fr) = (f(xl), f(xr));
    // Vertex of the parabola through (xl, fl), (x0, f0), (xr, fr).
    let num = (x0 - xl) * (x0 - xl) * (f0 - fr) - (x0 - xr) * (x0 - xr) * (f0 - fl);
    let den = (x0 - xl) * (f0 - fr) - (x0 - xr) * (f0 - fl);
    if den != 0.0 {
        let xv = x0 - 0.5 * num / den;
        if xv.is_finite() && xv > lo && xv < hi {
            let fv = f(xv);
            if fv < f0 {
                return (xv, fv);
            }
        }
    }
    (x0, f0)
}

/// Fiducial draws: per attempt, sample u* from the noise law and minimize the
/// squared residual r(theta) = ||y_obs - G(theta, u*)||^2 over the bounded
/// parameter range; the minimizer is retained when r <= epsilon.
///
/// Errors with the epsilon-too-small diagnosis when fewer than
/// [`GFI_MIN_RATE`] of the first [`GFI_ATTEMPT_FLOOR`] attempts are retained.
pub fn gfi_draws(
    model: &GenerativeModel,
    y_obs: &[f64],
    m: usize,
    epsilon: f64,
    stream: &mut RngStream,
) -> Result<InversionDraws> {
    gfi_draws_with_budget(model, y_obs, m, epsilon, stream, GFI_ATTEMPT_FLOOR)
}

/// [`gfi_draws`] with an explicit attempt floor for the acceptance-rate test.
pub fn gfi_draws_with_budget(
    model: &GenerativeModel,
    y_obs: &[f64],
    m: usize,
    epsilon: f64,
    stream: &mut RngStream,
    attempt_floor: u64,
) -> Result<InversionDraws> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {epsilon}"
        )));
    }
    if m == 0 {
        return Err(Error::Domain("target draw count must be positive".into()));
    }
    let (lo, hi) = model.theta_space();
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::ParameterDomain(format!(
            "the argmin search needs a bounded parameter range, got ({lo}, {hi})"
        )));
    }
    if y_obs.is_empty() || y_obs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("observed dataset must be finite and nonempty".into()));
    }
    let seed = stream.seed();
    let mut draws = Vec::with_capacity(m);
    let mut attempts = 0u64;
    let mut min_r = f64::INFINITY;
    let mut u = Vec::with_capacity(model.n());
    // RefCell because the argmin helper takes Fn; the borrow never escapes one call.
    let sim_buf = std::cell::RefCell::new(Vec::with_capacity(model.n()));
    while draws.len() < m {
        attempts += 1;
        u.clear();
        model.draw_noise_into(stream, &mut u);
        let residual = |theta: f64| -> f64 {
            let mut sim = sim_buf.borrow_mut();
            sim.clear();
            model.forward_into(theta, &u, &mut sim);
            debug_assert_eq!(sim.len(), y_obs.len());
            y_obs
                .iter()
                .zip(sim.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        };
        let (theta_star, r_star) = argmin_scalar(residual, lo, hi);
        min_r = min_r.min(r_star);
        if r_star <= epsilon {
            draws.push(theta_star);
        }
        if attempts >= attempt_floor {
            let rate = draws.len() as f64 / attempts as f64;
            if rate < GFI_MIN_RATE {
                return Err(Error::EpsilonTooSmall {
                    epsilon,
                    rate,
                    attempts,
                    min_distance: min_r,
                });
            }
        }
    }
    let rate = draws.len() as f64 / attempts as f64;
    Ok(InversionDraws {
        draws,
        engine: Engine::Gfi,
        acceptance_rate: Some(rate),
        epsilon: Some(epsilon),
        seed,
        notes: Vec::new(),
    })
}

/// Rejection draws: sample theta* from the prior, simulate a dataset, retain
/// theta* when the summary distance to the observed summary is below epsilon.
///
/// Errors with the epsilon-too-small diagnosis when fewer than
/// [`ABC_MIN_RATE`] of [`ABC_ATTEMPT_CAP`] attempts are retained, and with an
/// insufficient-data error when the cap is hit at a viable acceptance rate.
pub fn abc_draws(
    model: &GenerativeModel,
    y_obs: &[f64],
    prior: &ScalarLaw<f64>,
    m: usize,
    epsilon: f64,
    stream: &mut RngStream,
) -> Result<InversionDraws> {
    abc_draws_with_budget(model, y_obs, prior, m, epsilon, stream, ABC_ATTEMPT_CAP)
}

/// [`abc_draws`] with an explicit attempt cap.
#[allow(clippy::too_many_arguments)]
pub fn abc_draws_with_budget(
    model: &GenerativeModel,
    y_obs: &[f64],
    prior: &ScalarLaw<f64>,
    m: usize,
    epsilon: f64,
    stream: &mut RngStream,
    attempt_cap: u64,
) -> Result<InversionDraws> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {epsilon}"
        )));
    }
    if m == 0 {
        return Err(Error::Domain("target draw count must be positive".into()));
    }
    if y_obs.is_empty() || y_obs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("observed dataset must be finite and nonempty".into()));
    }
    let t_obs = model.summarize(y_obs);
    let seed = stream.seed();
    let mut draws = Vec::with_capacity(m);
    let mut attempts = 0u64;
    let mut min_d = f64::INFINITY;
    let mut u = Vec::with_capacity(model.n());
    let mut y = Vec::with_capacity(model.n());
    while draws.len() < m {
        attempts += 1;
        let theta = prior.draw(stream)?;
        u.clear();
        model.draw_noise_into(stream, &mut u);
        y.clear();
        model.forward_into(theta, &u, &mut y);
        let d = model.dist(model.summarize(&y), t_obs);
        if d < min_d {
            min_d = d;
        }
        if d < epsilon {
            draws.push(theta);
        }
        if draws.len() < m && attempts >= attempt_cap {
            let rate = draws.len() as f64 / attempts as f64;
            if rate < ABC_MIN_RATE {
                return Err(Error::EpsilonTooSmall {
                    epsilon,
                    rate,
                    attempts,
                    min_distance: min_d,
                });
            }
            return Err(Error::InsufficientData(format!(
                "attempt cap {attempt_cap} reached with {} of {m} draws; raise epsilon or lower the target",
                draws.len()
            )));
        }
    }
    let rate = draws.len() as f64 / attempts as f64;
    Ok(InversionDraws {
        draws,
        engine: Engine::Abc,
        acceptance_rate: Some(rate),
        epsilon: Some(epsilon),
        seed,
        notes: Vec::new(),
    })
}

/// Draws of the CD-random variable of an existing confidence distribution,
/// packaged like any other engine's output.
pub fn cd_rv_draws(cd: &ConfDist, m: usize, stream: RngStream) -> Result<InversionDraws> {
    let seed = stream.seed();
    let draws = cd.rv(stream).draw(m)?;
    Ok(InversionDraws {
        draws,
        engine: Engine::CdRv,
        acceptance_rate: None,
        epsilon: None,
        seed,
        notes: Vec::new(),
    })
}

/// Matching check: simulates R fresh datasets at theta0 to build the
/// empirical law of (estimate - theta0), and compares it, by two-sample KS
/// distance, with the artificial draws centered at the observed estimate.
pub fn matching_diagnostic(
    draws: &InversionDraws,
    model: &GenerativeModel,
    y_obs: &[f64],
    theta0: f64,
    r: usize,
    stream: &mut RngStream,
) -> Result<MatchingReport> {
    if r < 500 {
        return Err(Error::InsufficientData(format!(
            "matching check needs at least 500 reference replications, got {r}"
        )));
    }
    if draws.draws.is_empty() {
        return Err(Error::InsufficientData("no artificial draws".into()));
    }
    let theta_hat = model.estimate(y_obs);
    let artificial: Vec<f64> = draws.draws.iter().map(|t| t - theta_hat).collect();
    let reference: Vec<f64> = (0..r)
        .map(|_| model.estimate(&model.simulate(theta0, stream)) - theta0)
        .collect();
    let ks = ks_two_sample(&artificial, &reference);
    Ok(MatchingReport {
        engine: draws.engine,
        n: model.n(),
        ks_distance: ks,
        reference: format!(
            "empirical law of (estimate - theta) at theta = {theta0} over {r} fresh {} datasets",
            model.label()
        ),
        artificial: format!(
            "{} {} draws centered at the observed estimate {theta_hat}",
            draws.draws.len(),
            draws.engine.name()
        ),
        replications: (r, draws.draws.len()),
    })
}

/// Lifts a draw set into an empirical confidence distribution; every derived
/// inference (intervals, curve, p-values) then applies.
pub fn draws_to_cd(draws: &InversionDraws) -> Result<ConfDist> {
    ConfDist::empirical(
        draws.draws.clone(),
        draws.engine.name(),
        format!(
            "empirical CD over {} {} draws (seed {})",
            draws.draws.len(),
            draws.engine.name(),
            draws.seed
        ),
    )
}

/// Writes the draw set as a single-column CSV with header `theta_star`.
pub fn write_draws_csv(draws: &InversionDraws, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("theta_star\n");
    for &d in &draws.draws {
        out.push_str(&fmt_f64(d));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes the engine bookkeeping as flat key=value lines.
pub fn write_draws_meta(draws: &InversionDraws, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!(
        "engine={}\nseed={}\ndraws={}\n",
        draws.engine.name(),
        draws.seed,
        draws.draws.len()
    );
    if let Some(e) = draws.epsilon {
        out.push_str(&format!("epsilon={}\n", fmt_f64(e)));
    }
    if let Some(a) = draws.acceptance_rate {
        out.push_str(&format!("acceptance_rate={}\n", fmt_f64(a)));
    }
    for note in &draws.notes {
        out.push_str(&format!("note={note}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::models::{cauchy_location, normal_location, normal_location_reduced, CauchySummary};
    use super::*;
    use crate::build::normal_mean_cd;
    use crate::statkit::numeric::linspace;
    use crate::statkit::special::{norm_cdf, norm_pdf, norm_quantile};
    use crate::statkit::stats::{ks_vs_cdf, mean, median, sort};

    fn normal_sample(stream: &mut RngStream, n: usize, mu: f64) -> Vec<f64> {
        (0..n).map(|_| mu + norm_quantile(stream.uniform())).collect()
    }

    fn cauchy_sample(stream: &mut RngStream, n: usize, loc: f64) -> Vec<f64> {
        use std::f64::consts::PI;
        (0..n)
            .map(|_| loc + (PI * (stream.uniform() - 0.5)).tan())
            .collect()
    }

    #[test]
    fn bootstrap_constant_data_and_determinism() {
        let data = vec![2.5; 30];
        let mut stream = RngStream::new(11);
        let out = bootstrap_draws(&data, |y| mean(y), 600, &mut stream).unwrap();
        assert_eq!(out.draws.len(), 600);
        assert!(out.draws.iter().all(|&d| d == 2.5));
        assert!(matches!(draws_to_cd(&out), Err(Error::DegenerateSample(_))));

        let mut s1 = RngStream::new(99);
        let mut s2 = RngStream::new(99);
        let data = normal_sample(&mut RngStream::new(5), 40, 1.0);
        let a = bootstrap_draws(&data, |y| mean(y), 700, &mut s1).unwrap();
        let b = bootstrap_draws(&data, |y| mean(y), 700, &mut s2).unwrap();
        assert_eq!(a.draws, b.draws);

        assert!(matches!(
            bootstrap_draws(&data, |y| mean(y), 100, &mut s1),
            Err(Error::InsufficientData(_))
        ));
        // A statistic that always fails exhausts the redraw budget.
        assert!(matches!(
            bootstrap_draws(&data, |_| f64::NAN, 600, &mut s1),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn bootstrap_mean_matches_plugin_normal() {
        let mut stream = RngStream::new(0xb001);
        let data = normal_sample(&mut stream, 100, 0.0);
        let ybar = mean(&data);
        let var_plugin = data.iter().map(|y| (y - ybar) * (y - ybar)).sum::<f64>()
            / data.len() as f64;
        let se = (var_plugin / data.len() as f64).sqrt();
        let out = bootstrap_draws(&data, |y| mean(y), 2000, &mut stream).unwrap();
        let mut centered: Vec<f64> = out.draws.iter().map(|d| d - ybar).collect();
        sort(&mut centered);
        let ks = ks_vs_cdf(&centered, |x| norm_cdf(x / se));
        assert!(ks < 0.08, "bootstrap CLT KS distance {ks}");
    }

    #[test]
    fn gfi_reduced_normal_solves_exactly() {
        let mut stream = RngStream::new(0xf1d6);
        let n = 100;
        let data = normal_sample(&mut stream, n, 0.7);
        let ybar = mean(&data);
        let model = normal_location_reduced(n, (ybar - 3.0, ybar + 3.0));
        // Tight tolerance: acceptance stays 1 because the argmin residual is
        // exactly solvable, and r <= 1e-12 pins each theta* to the algebraic
        // solution ybar - ubar* within 1e-6.
        let out = gfi_draws(&model, &[ybar], 2000, 1e-12, &mut stream).unwrap();
        assert_eq!(out.acceptance_rate, Some(1.0));
        assert_eq!(out.draws.len(), 2000);

        let se = 1.0 / (n as f64).sqrt();
        let mut sorted = out.draws.clone();
        sort(&mut sorted);
        let ks = ks_vs_cdf(&sorted, |x| norm_cdf((x - ybar) / se));
        assert!(ks < 0.03, "fiducial draw law KS distance {ks}");

        // Empirical CD over the draws recovers the observed mean as median.
        let cd = draws_to_cd(&out).unwrap();
        let tol = 2.0 / (2000f64).sqrt() * se;
        let med = cd.quantile(0.5).unwrap();
        assert!(
            (med - ybar).abs() < tol,
            "median {med} vs mean {ybar} (tol {tol})"
        );

        // Matching: artificial theta* - ybar vs fresh estimate - theta0.
        let report =
            matching_diagnostic(&out, &model, &[ybar], 0.7, 2000, &mut stream).unwrap();
        assert!(report.ks_distance < 0.05, "matching KS {}", report.ks_distance);
        assert_eq!(report.replications, (2000, 2000));
        assert_eq!(report.n, n);
    }

    #[test]
    fn gfi_determinism_and_epsilon_failure() {
        let model = normal_location_reduced(25, (-3.0, 3.0));
        let mut s1 = RngStream::new(77);
        let mut s2 = RngStream::new(77);
        let a = gfi_draws(&model, &[0.1], 50, 1e-10, &mut s1).unwrap();
        let b = gfi_draws(&model, &[0.1], 50, 1e-10, &mut s2).unwrap();
        assert_eq!(a.draws, b.draws);

        // A forward map that cannot reach the observation: minimum residual
        // stays at 4, epsilon below it can never accept.
        let hopeless = GenerativeModel::new(
            "offset",
            1,
            (-1.0, 1.0),
            |theta, u, out| out.push(theta + u[0] + 2.0),
            "degenerate",
            |_, out| out.push(0.0),
            |y| y[0],
            |y| y[0],
        );
        let err =
            gfi_draws_with_budget(&hopeless, &[0.0], 10, 1e-3, &mut s1, 2000).unwrap_err();
        match err {
            Error::EpsilonTooSmall {
                rate, min_distance, ..
            } => {
                assert_eq!(rate, 0.0);
                assert!((min_distance - 1.0).abs() < 1e-6);
            }
            other => panic!("expected epsilon-too-small, got {other:?}"),
        }
    }

    #[test]
    fn abc_cauchy_mean_recovers_the_heavy_tailed_law() {
        let mut stream = RngStream::new(0xabc1);
        let n = 40;
        let data = cauchy_sample(&mut stream, n, 10.0);
        let ybar = mean(&data);
        let model = cauchy_location(n, (ybar - 30.0, ybar + 30.0), CauchySummary::Mean);
        let (prior, note) = flat_prior(ybar, &data).unwrap();
        let mut out = abc_draws(&model, &data, &prior, 2000, 0.05, &mut stream).unwrap();
        out.notes.push(note);
        let rate = out.acceptance_rate.unwrap();
        assert!(rate > 0.0 && rate <= 1.0);

        let mut sorted = out.draws.clone();
        sort(&mut sorted);
        let law = ScalarLaw::<f64>::Cauchy { loc: ybar, scale: 1.0 };
        let ks = ks_vs_cdf(&sorted, |x| law.cdf(x).unwrap());
        assert!(ks < 0.05, "mean-summary draw law KS distance {ks}");

        // Matching runs against the heavy-tailed reference, not a normal one.
        let report =
            matching_diagnostic(&out, &model, &data, 10.0, 800, &mut stream).unwrap();
        assert!(report.ks_distance < 0.08, "matching KS {}", report.ks_distance);
        let centered: Vec<f64> = out.draws.iter().map(|d| d - ybar).collect();
        let mut centered_sorted = centered;
        sort(&mut centered_sorted);
        let normal_sd = std::f64::consts::PI / (2.0 * (n as f64).sqrt());
        let ks_vs_normal = ks_vs_cdf(&centered_sorted, |x| norm_cdf(x / normal_sd));
        assert!(
            ks_vs_normal > 0.2,
            "heavy-tailed draws should not match the normal reference ({ks_vs_normal})"
        );
        assert!(report.reference.contains("cauchy"));
    }

    #[test]
    fn abc_cauchy_median_goes_normal() {
        let mut stream = RngStream::new(0xabc2);
        let n = 40;
        let data = cauchy_sample(&mut stream, n, 10.0);
        let med = median(&data);
        let model = cauchy_location(n, (med - 30.0, med + 30.0), CauchySummary::Median);
        let (prior, _) = flat_prior(med, &data).unwrap();
        let out = abc_draws(&model, &data, &prior, 1200, 0.02, &mut stream).unwrap();

        let sd = std::f64::consts::PI / (2.0 * (n as f64).sqrt());
        let mut sorted = out.draws.clone();
        sort(&mut sorted);
        let ks = ks_vs_cdf(&sorted, |x| norm_cdf((x - med) / sd));
        assert!(ks < 0.07, "median-summary draw law KS distance {ks}");

        // 95% interval of the lifted CD sits near the asymptotic width.
        let cd = draws_to_cd(&out).unwrap();
        let width = cd.interval(0.95).unwrap().width();
        let expect = 2.0 * norm_quantile(0.975) * sd;
        assert!(
            (width - expect).abs() < 0.08,
            "interval width {width} vs asymptotic {expect}"
        );
    }

    #[test]
    fn abc_epsilon_too_small_reports_the_gap() {
        let model = normal_location_reduced(4, (-5.0, 5.0));
        let prior = ScalarLaw::<f64>::Uniform { a: -5.0, b: 5.0 };
        let mut stream = RngStream::new(3);
        // The observation sits 100 units outside the prior's reach.
        let err = abc_draws_with_budget(&model, &[100.0], &prior, 10, 1e-6, &mut stream, 5000)
            .unwrap_err();
        match err {
            Error::EpsilonTooSmall {
                attempts,
                min_distance,
                ..
            } => {
                assert_eq!(attempts, 5000);
                assert!(min_distance > 90.0);
            }
            other => panic!("expected epsilon-too-small, got {other:?}"),
        }

        // Viable acceptance but an exhausted budget is a different failure.
        let err = abc_draws_with_budget(&model, &[0.0], &prior, 100_000, 0.5, &mut stream, 2000)
            .unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn abc_sufficient_summary_tightens_toward_the_posterior() {
        // In z = sqrt(n) (theta - ybar) units the accepted law has the exact
        // CDF 1 + [J(-c - z) - J(c - z)] / (2c), c = sqrt(n) epsilon, with
        // J(w) = w Phi(w) + phi(w): the flat-prior posterior smoothed by the
        // acceptance window. Its KS distance to the posterior is computable
        // in closed form, so the tightening claim is checked at the law
        // level; the engine is checked against the smoothed law at each
        // epsilon (finite-draw KS noise would swamp the tiny law-level gaps).
        let smoothed_cdf = |c: f64, z: f64| -> f64 {
            let j = |w: f64| w * norm_cdf(w) + norm_pdf(w);
            (1.0 + (j(-c - z) - j(c - z)) / (2.0 * c)).clamp(0.0, 1.0)
        };

        let n = 16usize;
        let root_n = (n as f64).sqrt();
        let mut stream = RngStream::new(0x5eed);
        let data = normal_sample(&mut stream, n, 2.0);
        let ybar = mean(&data);
        let model = normal_location_reduced(n, (ybar - 3.0, ybar + 3.0));
        let prior = ScalarLaw::<f64>::Uniform {
            a: ybar - 3.0,
            b: ybar + 3.0,
        };

        let zs = linspace(-6.0, 6.0, 2001);
        let mut law_ks = Vec::new();
        for frac in [0.4, 0.2, 0.1, 0.05] {
            let eps = frac / root_n;
            let c = root_n * eps;
            let ks_law = zs
                .iter()
                .map(|&z| (smoothed_cdf(c, z) - norm_cdf(z)).abs())
                .fold(0.0, f64::max);
            law_ks.push(ks_law);

            let out = abc_draws(&model, &[ybar], &prior, 2000, eps, &mut stream).unwrap();
            let mut z_draws: Vec<f64> =
                out.draws.iter().map(|t| root_n * (t - ybar)).collect();
            sort(&mut z_draws);
            let ks_engine = ks_vs_cdf(&z_draws, |z| smoothed_cdf(c, z));
            assert!(
                ks_engine < 0.04,
                "draws vs smoothed law at eps {eps}: KS {ks_engine}"
            );
        }
        for w in law_ks.windows(2) {
            assert!(
                w[1] < w[0],
                "law-level KS must shrink with epsilon: {law_ks:?}"
            );
        }
    }

    #[test]
    fn cd_rv_matching_is_exact_for_the_normal_mean() {
        let mut stream = RngStream::new(0xcdcd);
        let n = 50;
        let data = normal_sample(&mut stream, n, -1.0);
        let ybar = mean(&data);
        let cd = normal_mean_cd(&data).unwrap();
        let out = cd_rv_draws(&cd, 2000, stream.substream(1)).unwrap();
        assert_eq!(out.engine, Engine::CdRv);

        let model = normal_location_reduced(n, (ybar - 3.0, ybar + 3.0));
        let mut diag_stream = stream.substream(2);
        let report =
            matching_diagnostic(&out, &model, &[ybar], -1.0, 2000, &mut diag_stream).unwrap();
        assert!(report.ks_distance < 0.04, "matching KS {}", report.ks_distance);
    }

    #[test]
    fn bootstrap_matching_tracks_the_sampling_law() {
        let mut stream = RngStream::new(0xb007);
        let n = 200;
        let data = normal_sample(&mut stream, n, 0.3);
        let out = bootstrap_draws(&data, |y| mean(y), 2000, &mut stream).unwrap();
        let model = normal_location(n, (-3.0, 3.0));
        let report = matching_diagnostic(&out, &model, &data, 0.3, 2000, &mut stream).unwrap();
        assert!(report.ks_distance < 0.06, "matching KS {}", report.ks_distance);
        assert!(matches!(
            matching_diagnostic(&out, &model, &data, 0.3, 100, &mut stream),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn draw_exports_round_trip_the_values() {
        let dir = std::env::temp_dir().join("confdist_invert_export_test");
        std::fs::create_dir_all(&dir).unwrap();
        let draws = InversionDraws {
            draws: vec![0.1, -2.5, 1.0 / 3.0],
            engine: Engine::Abc,
            acceptance_rate: Some(0.25),
            epsilon: Some(0.05),
            seed: 42,
            notes: vec!["flat prior realized as uniform".into()],
        };
        let csv = dir.join("draws.csv");
        let meta = dir.join("draws.meta");
        write_draws_csv(&draws, &csv).unwrap();
        write_draws_meta(&draws, &meta).unwrap();
        let csv_text = std::fs::read_to_string(&csv).unwrap();
        let mut lines = csv_text.lines();
        assert_eq!(lines.next(), Some("theta_star"));
        let parsed: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, draws.draws);
        let meta_text = std::fs::read_to_string(&meta).unwrap();
        assert!(meta_text.contains("engine=abc"));
        assert!(meta_text.contains("seed=42"));
        assert!(meta_text.contains("epsilon=0.05"));
        assert!(meta_text.contains("acceptance_rate=0.25"));
        assert!(meta_text.contains("note=flat prior"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn flat_prior_and_default_epsilon_use_the_robust_scale() {
        let data = vec![1.0, 2.0, 3.0, 4.0, 100.0];
        let scale = robust_scale(&data).unwrap();
        assert!((scale - 1.4826).abs() < 1e-12);
        let (prior, note) = flat_prior(2.0, &data).unwrap();
        match prior {
            ScalarLaw::Uniform { a, b } => {
                assert!((a - (2.0 - 20.0 * scale)).abs() < 1e-12);
                assert!((b - (2.0 + 20.0 * scale)).abs() < 1e-12);
            }
            other => panic!("expected uniform, got {other:?}"),
        }
        assert!(note.contains("flat prior"));
        let eps = default_epsilon(&data).unwrap();
        assert!((eps - 0.05 * scale / 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            robust_scale(&[3.0, 3.0, 3.0]),
            Err(Error::DegenerateSample(_))
        ));
    }
}
