//! Simulation harness: coverage studies, the billiard-table posterior, and
//! the uniformity / randomness-matching diagnostic suites.
//!
//! Coverage studies are driven by a [`StudyConfig`] and return a
//! [`CoverageReport`] with one row per method. Replication `i` always draws
//! from `substream(i)` of the master seed, and per-replicate results are
//! collected in index order before any aggregation, so reports are identical
//! for any rayon worker count.

pub mod bivariate;
pub mod cauchy;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::build::{fisher_z_cd, neyman_scott_cd, normal_mean_cd, normalized_likelihood_cd};
use crate::build::{BivariateSample, GridWindow, PairedSample};
use crate::cd::ConfDist;
use crate::error::{Error, Result};
use crate::invert::{
    self, bootstrap_draws, cd_rv_draws, gfi_draws, matching_diagnostic, models, MatchingReport,
};
use crate::statkit::special::norm_quantile;
use crate::statkit::stats;
use crate::statkit::RngStream;

/// Kolmogorov-Smirnov 95% factor: the one-sample bound is `1.36 / sqrt(R)`.
const KS_FACTOR: f64 = 1.36;

/// Extra KS allowance for the Fisher-z pivot, which is exact only as n grows.
/// Calibrated so the check stays meaningful at n >= 200.
const FISHER_Z_ALLOWANCE: f64 = 0.0145;

/// Which coverage study a [`StudyConfig`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Study {
    /// Four bivariate-normal studies of a common correlation, one CD method
    /// each, plus their combination.
    BivariateMeta,
    /// Cauchy location with approximate-computation engines against the
    /// flat-prior posterior.
    CauchyAbc,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::BivariateMeta => "bivariate-meta",
            Study::CauchyAbc => "cauchy-abc",
        }
    }

    /// Method names the study can report, in report order.
    pub fn methods(self) -> &'static [&'static str] {
        match self {
            Study::BivariateMeta => &["fisher-z", "bca", "profile", "bayes", "combined"],
            Study::CauchyAbc => &["abc-mean", "abc-median", "posterior"],
        }
    }
}

/// Configuration for one coverage study run.
#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub study: Study,
    pub replications: usize,
    /// Observations per dataset (per study arm for the meta-analysis).
    pub n: usize,
    /// True parameter values by name; missing keys fall back to defaults.
    pub true_params: BTreeMap<String, f64>,
    /// Two-sided confidence level for the reported intervals.
    pub level: f64,
    pub master_seed: u64,
    /// Methods to report; empty means all of `study.methods()`.
    pub engines: Vec<String>,
    /// If set, `report::emit` writes coverage.csv and metadata.json here.
    pub output_dir: Option<PathBuf>,
}

impl StudyConfig {
    /// Meta-analysis defaults: the classic fourfold study of a common
    /// correlation with unequal means and variances.
    pub fn bivariate_meta(replications: usize, n: usize, master_seed: u64) -> Self {
        let mut p = BTreeMap::new();
        p.insert("mu1".into(), 3.288);
        p.insert("mu2".into(), 4.093);
        p.insert("sigma1_sq".into(), 0.657);
        p.insert("sigma2_sq".into(), 1.346);
        p.insert("rho".into(), 0.723);
        StudyConfig {
            study: Study::BivariateMeta,
            replications,
            n,
            true_params: p,
            level: 0.95,
            master_seed,
            engines: Vec::new(),
            output_dir: None,
        }
    }

    /// Cauchy location defaults: location 10, unit scale.
    pub fn cauchy_abc(replications: usize, n: usize, master_seed: u64) -> Self {
        let mut p = BTreeMap::new();
        p.insert("theta".into(), 10.0);
        StudyConfig {
            study: Study::CauchyAbc,
            replications,
            n,
            true_params: p,
            level: 0.95,
            master_seed,
            engines: Vec::new(),
            output_dir: None,
        }
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_engines(mut self, engines: &[&str]) -> Self {
        self.engines = engines.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = Some(dir.into());
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.true_params.insert(key.into(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.true_params.get(key).copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::ParameterDomain(format!(
                "coverage needs at least 100 replications, got {}",
                self.replications
            )));
        }
        if self.n < 4 {
            return Err(Error::ParameterDomain(format!(
                "need at least 4 observations per dataset, got {}",
                self.n
            )));
        }
        if !(0.0 < self.level && self.level < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "level must be in (0,1), got {}",
                self.level
            )));
        }
        if self.true_params.values().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain("non-finite true parameter".into()));
        }
        let known = self.study.methods();
        for e in &self.engines {
            if !known.contains(&e.as_str()) {
                return Err(Error::Unsupported(format!(
                    "unknown method '{}' for study {}; know {:?}",
                    e,
                    self.study.name(),
                    known
                )));
            }
        }
        match self.study {
            Study::BivariateMeta => {
                for key in ["sigma1_sq", "sigma2_sq"] {
                    if let Some(v) = self.param(key) {
                        if v <= 0.0 {
                            return Err(Error::ParameterDomain(format!("{key} must be positive")));
                        }
                    }
                }
                if let Some(r) = self.param("rho") {
                    if !(r.abs() < 1.0) {
                        return Err(Error::ParameterDomain(format!(
                            "rho must lie in (-1,1), got {r}"
                        )));
                    }
                }
            }
            Study::CauchyAbc => {}
        }
        Ok(())
    }

    /// True if `method` should appear in the report.
    pub(crate) fn wants(&self, method: &str) -> bool {
        self.engines.is_empty() || self.engines.iter().any(|e| e == method)
    }
}

/// One line of a coverage report.
#[derive(Clone, Debug)]
pub struct MethodRow {
    pub method: String,
    /// Fraction of included replications whose interval covered the truth.
    pub coverage: f64,
    pub mean_length: f64,
    /// Sample standard deviation of the interval lengths (0 if fewer than 2).
    pub length_sd: f64,
}

/// Aggregated result of a coverage study.
#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub study: String,
    pub rows: Vec<MethodRow>,
    pub replications: usize,
    /// Replications dropped for per-replicate failures (capped at 1%).
    pub excluded: usize,
    pub seed: u64,
    pub runtime_seconds: f64,
}

pub(crate) fn summarize_method(method: &str, hits: usize, lengths: &[f64]) -> MethodRow {
    let used = lengths.len().max(1) as f64;
    let mean_length = if lengths.is_empty() { f64::NAN } else { stats::mean(lengths) };
    let length_sd = if lengths.len() < 2 { 0.0 } else { stats::sd(lengths) };
    MethodRow {
        method: method.into(),
        coverage: hits as f64 / used,
        mean_length,
        length_sd,
    }
}

/// Enforces the 1% failure cap: returns the successful results, or an error
/// naming the first failure once too many replications have been dropped.
pub(crate) fn apply_failure_cap<T>(
    results: Vec<Result<T>>,
    replications: usize,
) -> Result<(Vec<T>, usize)> {
    let cap = replications / 100;
    let mut kept = Vec::with_capacity(results.len());
    let mut excluded = 0usize;
    for r in results {
        match r {
            Ok(v) => kept.push(v),
            Err(e) => {
                excluded += 1;
                if excluded > cap {
                    return Err(Error::Invalid(format!(
                        "replicate failures exceeded the 1% cap ({excluded} of {replications}): {e}"
                    )));
                }
            }
        }
    }
    Ok((kept, excluded))
}

/// Flat-prior posterior for a binomial success probability: observing `y`
/// successes in `n` trials yields Beta(y + 1, n - y + 1) as a distribution
/// estimator on [0, 1], with hard support edges at both ends.
pub fn run_billiard(y: u64, n: u64) -> Result<ConfDist> {
    if n == 0 {
        return Err(Error::ParameterDomain("need at least one trial".into()));
    }
    if y > n {
        return Err(Error::ParameterDomain(format!(
            "successes {y} exceed trials {n}"
        )));
    }
    let (yf, nf) = (y as f64, n as f64);
    // Kernel y ln p + (n - y) ln(1 - p); drop vanishing terms so y = 0 and
    // y = n stay finite everywhere except the opposing endpoint.
    let loglik = move |p: f64| {
        let mut l = 0.0;
        if y > 0 {
            l += yf * p.ln();
        }
        if y < n {
            l += (nf - yf) * (1.0 - p).ln();
        }
        l
    };
    normalized_likelihood_cd(
        loglik,
        GridWindow::new(0.0, 1.0).with_support(0.0, 1.0),
        "binomial success probability",
        format!("flat-prior binomial posterior Beta({}, {})", y + 1, n - y + 1),
    )
}

/// Result of one uniformity check: the KS distance between replicated
/// CD values at the truth and the uniform law, with its pass bound.
#[derive(Clone, Debug)]
pub struct KsSummary {
    pub constructor: String,
    pub theta0: f64,
    pub n: usize,
    pub replications: usize,
    pub ks_distance: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Replicates a constructor at a fixed truth and checks that H(theta0) is
/// uniform. Exact pivots get the plain 95% KS bound; the Fisher-z pivot gets
/// a small extra allowance for its large-sample approximation.
///
/// Constructors: `"normal-mean"` (theta0 is the mean, unit variance),
/// `"neyman-scott"` (theta0 is the common variance; pair means are drawn
/// uniformly on (0, 10)), `"fisher-z"` (theta0 is the correlation).
pub fn run_uniformity_suite(
    constructor: &str,
    theta0: f64,
    n: usize,
    r: usize,
    stream: &mut RngStream,
) -> Result<KsSummary> {
    if r < 100 {
        return Err(Error::InsufficientData(format!(
            "uniformity check needs at least 100 replications, got {r}"
        )));
    }
    let mut pits = Vec::with_capacity(r);
    let mut bound = KS_FACTOR / (r as f64).sqrt();
    match constructor {
        "normal-mean" => {
            for _ in 0..r {
                let data: Vec<f64> =
                    (0..n).map(|_| theta0 + norm_quantile(stream.uniform())).collect();
                pits.push(normal_mean_cd(&data)?.eval(theta0));
            }
        }
        "neyman-scott" => {
            if theta0 <= 0.0 {
                return Err(Error::ParameterDomain(format!(
                    "variance must be positive, got {theta0}"
                )));
            }
            let sigma = theta0.sqrt();
            for _ in 0..r {
                let pairs: Vec<(f64, f64)> = (0..n)
                    .map(|_| {
                        let mu = 10.0 * stream.uniform();
                        (
                            mu + sigma * norm_quantile(stream.uniform()),
                            mu + sigma * norm_quantile(stream.uniform()),
                        )
                    })
                    .collect();
                pits.push(neyman_scott_cd(&PairedSample::new(pairs)?)?.eval(theta0));
            }
        }
        "fisher-z" => {
            if !(theta0.abs() < 1.0) {
                return Err(Error::ParameterDomain(format!(
                    "correlation must lie in (-1,1), got {theta0}"
                )));
            }
            let s = (1.0 - theta0 * theta0).sqrt();
            for _ in 0..r {
                let rows: Vec<(f64, f64)> = (0..n)
                    .map(|_| {
                        let z1 = norm_quantile(stream.uniform());
                        let z2 = norm_quantile(stream.uniform());
                        (z1, theta0 * z1 + s * z2)
                    })
                    .collect();
                pits.push(fisher_z_cd(&BivariateSample::new(rows)?)?.eval(theta0));
            }
            bound += FISHER_Z_ALLOWANCE;
        }
        other => {
            return Err(Error::Unsupported(format!(
                "unknown uniformity constructor '{other}'"
            )));
        }
    }
    let ks_distance = stats::ks_uniform(&pits);
    Ok(KsSummary {
        constructor: constructor.into(),
        theta0,
        n,
        replications: r,
        ks_distance,
        bound,
        pass: ks_distance < bound,
    })
}

/// One matching-suite entry: the diagnostic report plus its pass bound.
#[derive(Clone, Debug)]
pub struct MatchingRow {
    pub report: MatchingReport,
    pub bound: f64,
    pub pass: bool,
}

/// Runs the randomness-matching diagnostic across all four draw engines at a
/// fixed desk scale (2000 draws against 2000 fresh reference datasets each)
/// and reports the two-sample KS distances with their pass bounds.
///
/// The artificial randomness of an engine is fit for use only if it is
/// indistinguishable from the sampling randomness it stands in for; each
/// scenario below has that agreement in the exact or large-sample limit, so
/// the bounds sit just above two-sample KS noise.
pub fn run_matching_suite(master_seed: u64) -> Result<Vec<MatchingRow>> {
    const M: usize = 2000;
    const R: usize = 2000;
    let root = RngStream::new(master_seed);
    let mut rows = Vec::with_capacity(4);

    // cd-rv on the normal mean: H_n inverts exactly, so the CD-random-variable
    // draws reproduce the sampling law of ybar up to KS noise alone.
    {
        let scenario = root.substream(0);
        let n = 100;
        let theta0 = 0.3;
        let mut data_s = scenario.substream(0);
        let y_obs: Vec<f64> =
            (0..n).map(|_| theta0 + norm_quantile(data_s.uniform())).collect();
        let cd = normal_mean_cd(&y_obs)?;
        let out = cd_rv_draws(&cd, M, scenario.substream(1))?;
        let model = models::normal_location(n, (-4.0, 4.0));
        let mut ref_s = scenario.substream(2);
        let report = matching_diagnostic(&out, &model, &y_obs, theta0, R, &mut ref_s)?;
        rows.push(score(report, 0.04));
    }

    // Bootstrap of the mean at n = 200: the resampling law matches the
    // sampling law to first order.
    {
        let scenario = root.substream(1);
        let n = 200;
        let theta0 = -0.7;
        let mut data_s = scenario.substream(0);
        let y_obs: Vec<f64> =
            (0..n).map(|_| theta0 + norm_quantile(data_s.uniform())).collect();
        let mut boot_s = scenario.substream(1);
        let out = bootstrap_draws(&y_obs, &stats::mean, M, &mut boot_s)?;
        let model = models::normal_location(n, (-4.0, 4.0));
        let mut ref_s = scenario.substream(2);
        let report = matching_diagnostic(&out, &model, &y_obs, theta0, R, &mut ref_s)?;
        rows.push(score(report, 0.06));
    }

    // Fiducial draws on the reduced normal model solve the matching equation
    // exactly, so only KS noise separates the two samples.
    {
        let scenario = root.substream(2);
        let n = 100;
        let theta0 = 1.1;
        let mut data_s = scenario.substream(0);
        let ybar = theta0
            + stats::mean(
                &(0..n).map(|_| norm_quantile(data_s.uniform())).collect::<Vec<f64>>(),
            );
        let y_obs = vec![ybar];
        let model = models::normal_location_reduced(n, (ybar - 3.0, ybar + 3.0));
        let mut gfi_s = scenario.substream(1);
        let out = gfi_draws(&model, &y_obs, M, 1e-12, &mut gfi_s)?;
        let mut ref_s = scenario.substream(2);
        let report = matching_diagnostic(&out, &model, &y_obs, theta0, R, &mut ref_s)?;
        rows.push(score(report, 0.05));
    }

    // ABC on the Cauchy mean at n = 100: the mean of n standard Cauchy errors
    // is standard Cauchy again, so artificial and sampling randomness share a
    // law. The tolerance is widened to 0.3 robust-scale units to keep the run
    // desk-sized; the uniform smoothing that adds is an order of magnitude
    // below the detection threshold here.
    {
        let scenario = root.substream(3);
        let n = 100;
        let theta0 = 10.0;
        let mut data_s = scenario.substream(0);
        let y_obs: Vec<f64> = (0..n)
            .map(|_| theta0 + (std::f64::consts::PI * (data_s.uniform() - 0.5)).tan())
            .collect();
        let ybar = stats::mean(&y_obs);
        let (prior, _) = invert::flat_prior(ybar, &y_obs)?;
        let epsilon = 0.3 * invert::robust_scale(&y_obs)?;
        let model = models::cauchy_location(n, (-1e6, 1e6), models::CauchySummary::Mean);
        let mut abc_s = scenario.substream(1);
        let out = invert::abc_draws(&model, &y_obs, &prior, M, epsilon, &mut abc_s)?;
        let mut ref_s = scenario.substream(2);
        let report = matching_diagnostic(&out, &model, &y_obs, theta0, R, &mut ref_s)?;
        rows.push(score(report, 0.06));
    }

    Ok(rows)
}

fn score(report: MatchingReport, bound: f64) -> MatchingRow {
    let pass = report.ks_distance < bound;
    MatchingRow { report, bound, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statkit::special::inc_beta;
    use crate::statkit::{numeric, RngStream};

    #[test]
    fn billiard_matches_the_beta_posterior() {
        // 5 successes in 14 trials: Beta(6, 10), mean 6/16 = 0.375.
        let cd = run_billiard(5, 14).unwrap();
        let (grid, _) = cd.grid().unwrap();
        let dx = grid[1] - grid[0];
        let weighted: Vec<f64> =
            grid.iter().map(|&p| p * cd.density(p).unwrap()).collect();
        let mean = numeric::simpson_uniform(&weighted, dx);
        assert!(
            (mean - 0.375).abs() < 1e-6,
            "posterior mean {mean} should be 0.375"
        );
        for p in [0.05, 0.2, 0.375, 0.6, 0.9] {
            let exact = inc_beta(6.0, 10.0, p);
            assert!(
                (cd.eval(p) - exact).abs() < 1e-6,
                "CDF at {p}: {} vs Beta(6,10) {exact}",
                cd.eval(p)
            );
        }
        assert_eq!(cd.eval(0.0), 0.0);
        assert_eq!(cd.eval(1.0), 1.0);
        let (lo, hi) = cd.support();
        assert_eq!((lo, hi), (0.0, 1.0));
    }

    #[test]
    fn billiard_handles_the_corner_counts() {
        // y = 0: density 2(1 - p) on [0,1]; y = n: mirror image.
        let cd = run_billiard(0, 1).unwrap();
        for p in [0.1, 0.4, 0.8] {
            let exact = 1.0 - (1.0 - p) * (1.0 - p);
            assert!((cd.eval(p) - exact).abs() < 1e-6);
        }
        let cd = run_billiard(1, 1).unwrap();
        for p in [0.1, 0.4, 0.8] {
            assert!((cd.eval(p) - p * p).abs() < 1e-6);
        }
        assert!(run_billiard(3, 2).is_err());
        assert!(run_billiard(0, 0).is_err());
    }

    #[test]
    fn uniformity_holds_for_the_exact_pivots() {
        let mut s = RngStream::new(0x00f1_7af1);
        let normal = run_uniformity_suite("normal-mean", 0.5, 50, 2000, &mut s).unwrap();
        assert!(
            normal.pass,
            "normal mean KS {} vs bound {}",
            normal.ks_distance, normal.bound
        );
        let ns = run_uniformity_suite("neyman-scott", 1.0, 100, 2000, &mut s).unwrap();
        assert!(ns.pass, "variance KS {} vs bound {}", ns.ks_distance, ns.bound);
        assert!((normal.bound - 1.36 / 2000f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn uniformity_holds_for_fisher_z_with_its_allowance() {
        let mut s = RngStream::new(0x00f1_7af2);
        let fz = run_uniformity_suite("fisher-z", 0.723, 200, 2000, &mut s).unwrap();
        assert!(fz.pass, "fisher-z KS {} vs bound {}", fz.ks_distance, fz.bound);
        assert!(fz.bound > 1.36 / 2000f64.sqrt());
        assert!(run_uniformity_suite("nope", 0.0, 10, 2000, &mut s).is_err());
        assert!(run_uniformity_suite("normal-mean", 0.0, 10, 50, &mut s).is_err());
    }

    #[test]
    fn matching_suite_passes_across_engines() {
        let rows = run_matching_suite(0x3a7c_11).unwrap();
        assert_eq!(rows.len(), 4);
        let engines: Vec<&str> =
            rows.iter().map(|r| r.report.engine.name()).collect();
        assert_eq!(engines, ["cd-rv", "bootstrap", "gfi", "abc"]);
        for row in &rows {
            assert!(
                row.pass,
                "{} KS {} vs bound {}",
                row.report.engine.name(),
                row.report.ks_distance,
                row.bound
            );
        }
        // Deterministic: same seed, same distances.
        let again = run_matching_suite(0x3a7c_11).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.report.ks_distance, b.report.ks_distance);
        }
    }

    #[test]
    fn config_validation_rejects_bad_settings() {
        let ok = StudyConfig::bivariate_meta(500, 200, 1);
        assert!(ok.validate().is_ok());
        assert!(StudyConfig::bivariate_meta(50, 200, 1).validate().is_err());
        assert!(StudyConfig::bivariate_meta(500, 2, 1).validate().is_err());
        assert!(ok.clone().with_level(1.0).validate().is_err());
        assert!(ok.clone().with_param("rho", 1.0).validate().is_err());
        assert!(ok.clone().with_param("sigma1_sq", -1.0).validate().is_err());
        assert!(ok.clone().with_engines(&["nope"]).validate().is_err());
        assert!(ok.clone().with_engines(&["bca", "combined"]).validate().is_ok());
        let c = StudyConfig::cauchy_abc(400, 40, 2);
        assert!(c.validate().is_ok());
        assert_eq!(c.param("theta"), Some(10.0));
        assert!(c.wants("abc-mean"));
        assert!(!c.clone().with_engines(&["posterior"]).wants("abc-mean"));
    }

    #[test]
    fn summaries_and_the_failure_cap_behave() {
        let row = summarize_method("m", 190, &vec![2.0; 200]);
        assert!((row.coverage - 0.95).abs() < 1e-12);
        assert_eq!(row.mean_length, 2.0);
        assert_eq!(row.length_sd, 0.0);
        let ok: Vec<crate::error::Result<u32>> = (0..200).map(Ok).collect();
        let (kept, excluded) = apply_failure_cap(ok, 200).unwrap();
        assert_eq!((kept.len(), excluded), (200, 0));
        let mut mixed: Vec<crate::error::Result<u32>> = (0..198).map(Ok).collect();
        mixed.push(Err(Error::Invalid("a".into())));
        mixed.push(Err(Error::Invalid("b".into())));
        let (kept, excluded) = apply_failure_cap(mixed, 200).unwrap();
        assert_eq!((kept.len(), excluded), (198, 2));
        let mut over: Vec<crate::error::Result<u32>> = (0..197).map(Ok).collect();
        over.extend((0..3).map(|_| Err(Error::Invalid("c".into()))));
        assert!(apply_failure_cap(over, 200).is_err());
    }
}
