//! Coverage study for a common correlation across four bivariate-normal
//! studies, one CD method per study, plus their combination.
//!
//! Each replication draws four independent datasets at the same true
//! correlation and builds: a Fisher-z CD, a BCa bootstrap CD, a profile
//! likelihood CD, and a flat-prior Bayesian posterior, then combines all four.
//! Coverage and interval length are reported per method.

use std::time::Instant;

use rayon::prelude::*;

use crate::build::{bca_bootstrap_cd, fisher_z_cd, normalized_likelihood_cd};
use crate::build::{BivariateSample, GridWindow};
use crate::cd::ConfDist;
use crate::combine::{Combiner, CombinerSpec, StudyInput};
use crate::error::{Error, Result};
use crate::harness::{apply_failure_cap, summarize_method, CoverageReport, Study, StudyConfig};
use crate::statkit::numeric::linspace;
use crate::statkit::special::{hyp2f1_half_half, norm_quantile};
use crate::statkit::RngStream;

/// Tuning knobs with desk-scale defaults.
#[derive(Clone, Copy, Debug)]
pub struct BivariateOptions {
    /// Bootstrap resamples per BCa fit.
    pub bootstrap_b: usize,
    /// Grid points for the combination, spread over (-0.999, 0.999).
    pub combiner_points: usize,
}

impl Default for BivariateOptions {
    fn default() -> Self {
        BivariateOptions { bootstrap_b: 1000, combiner_points: 2001 }
    }
}

fn sample_rows(
    stream: &mut RngStream,
    n: usize,
    mu1: f64,
    mu2: f64,
    s1: f64,
    s2: f64,
    rho: f64,
) -> Vec<(f64, f64)> {
    let t = (1.0 - rho * rho).sqrt();
    (0..n)
        .map(|_| {
            let z1 = norm_quantile(stream.uniform());
            let z2 = norm_quantile(stream.uniform());
            (mu1 + s1 * z1, mu2 + s2 * (rho * z1 + t * z2))
        })
        .collect()
}

/// Profile-likelihood CD for the correlation: with the means and the scaled
/// variances profiled out at their constrained maximizers, the log profile
/// likelihood reduces to (n/2) ln(1 - rho^2) - n ln(1 - rho r), which is then
/// normalized to a distribution estimator on (-1, 1).
pub fn profile_rho_cd(data: &BivariateSample) -> Result<ConfDist> {
    let n = data.n() as f64;
    let r = data.r();
    if !r.is_finite() || r.abs() >= 1.0 {
        return Err(Error::DegenerateSample(format!(
            "sample correlation is {r}; the profile needs |r| < 1"
        )));
    }
    let loglik =
        move |rho: f64| 0.5 * n * (1.0 - rho * rho).ln() - n * (1.0 - rho * r).ln();
    normalized_likelihood_cd(
        loglik,
        GridWindow::new(-0.999, 0.999).with_support(-1.0, 1.0),
        "correlation (profile likelihood)",
        format!("normalized profile likelihood, n = {}, r = {r:.6}", data.n()),
    )
}

/// Flat-prior Bayesian posterior for the correlation of a bivariate normal,
/// with the four nuisance parameters integrated out under the reference flat
/// prior. The marginal posterior kernel is
/// (1 - rho^2)^((n-3)/2) (1 - rho r)^(5/2 - n) 2F1(1/2, 1/2; n - 3/2; (1 + rho r)/2).
pub fn bayes_rho_cd(data: &BivariateSample) -> Result<ConfDist> {
    let n = data.n() as f64;
    let r = data.r();
    if !r.is_finite() || r.abs() >= 1.0 {
        return Err(Error::DegenerateSample(format!(
            "sample correlation is {r}; the posterior needs |r| < 1"
        )));
    }
    if data.n() < 4 {
        return Err(Error::InsufficientData(format!(
            "posterior needs n >= 4, got {}",
            data.n()
        )));
    }
    let loglik = move |rho: f64| {
        0.5 * (n - 3.0) * (1.0 - rho * rho).ln() + (2.5 - n) * (1.0 - rho * r).ln()
            + hyp2f1_half_half(n - 1.5, (1.0 + rho * r) / 2.0).ln()
    };
    normalized_likelihood_cd(
        loglik,
        GridWindow::new(-0.999, 0.999).with_support(-1.0, 1.0),
        "correlation (flat-prior posterior)",
        format!("marginal flat-prior posterior, n = {}, r = {r:.6}", data.n()),
    )
}

/// Runs the meta-analysis coverage study with default options.
pub fn run_bivariate_meta(cfg: &StudyConfig) -> Result<CoverageReport> {
    run_bivariate_meta_with(cfg, BivariateOptions::default())
}

/// Runs the meta-analysis coverage study. Replication i uses substream i of
/// the master seed; all five methods are computed per replication (the
/// combination needs every study CD) and `cfg.engines` filters the report.
pub fn run_bivariate_meta_with(
    cfg: &StudyConfig,
    opts: BivariateOptions,
) -> Result<CoverageReport> {
    cfg.validate()?;
    if cfg.study != Study::BivariateMeta {
        return Err(Error::Invalid(format!(
            "config is for study {}, not bivariate-meta",
            cfg.study.name()
        )));
    }
    // The BCa construction refuses fewer than 1000 resamples.
    if opts.bootstrap_b < 1000 || opts.combiner_points < 101 {
        return Err(Error::ParameterDomain(
            "need bootstrap_b >= 1000 and combiner_points >= 101".into(),
        ));
    }
    let start = Instant::now();
    let mu1 = cfg.param("mu1").unwrap_or(3.288);
    let mu2 = cfg.param("mu2").unwrap_or(4.093);
    let s1 = cfg.param("sigma1_sq").unwrap_or(0.657).sqrt();
    let s2 = cfg.param("sigma2_sq").unwrap_or(1.346).sqrt();
    let rho0 = cfg.param("rho").unwrap_or(0.723);
    let level = cfg.level;
    let grid = linspace(-0.999, 0.999, opts.combiner_points);
    let combiner = Combiner::new(CombinerSpec::new(4, grid))?;
    let root = RngStream::new(cfg.master_seed);

    let results: Vec<Result<[(bool, f64); 5]>> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let rep = root.substream(i as u64);
            replicate(&rep, cfg.n, mu1, mu2, s1, s2, rho0, level, &combiner, opts.bootstrap_b)
        })
        .collect();
    let (kept, excluded) = apply_failure_cap(results, cfg.replications)?;

    let mut rows = Vec::new();
    for (idx, method) in Study::BivariateMeta.methods().iter().enumerate() {
        if !cfg.wants(method) {
            continue;
        }
        let hits = kept.iter().filter(|r| r[idx].0).count();
        let lengths: Vec<f64> = kept.iter().map(|r| r[idx].1).collect();
        rows.push(summarize_method(method, hits, &lengths));
    }
    Ok(CoverageReport {
        study: Study::BivariateMeta.name().into(),
        rows,
        replications: cfg.replications,
        excluded,
        seed: cfg.master_seed,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[allow(clippy::too_many_arguments)]
fn replicate(
    rep: &RngStream,
    n: usize,
    mu1: f64,
    mu2: f64,
    s1: f64,
    s2: f64,
    rho0: f64,
    level: f64,
    combiner: &Combiner,
    b: usize,
) -> Result<[(bool, f64); 5]> {
    let mut gen = rep.substream(0);
    let mut datasets = Vec::with_capacity(4);
    for _ in 0..4 {
        let rows = sample_rows(&mut gen, n, mu1, mu2, s1, s2, rho0);
        datasets.push(BivariateSample::new(rows)?);
    }
    let cd_fz = fisher_z_cd(&datasets[0])?;
    let mut boot = rep.substream(1);
    let (cd_bca, _) = bca_bootstrap_cd(&datasets[1], b, &mut boot)?;
    let cd_prof = profile_rho_cd(&datasets[2])?;
    let cd_bayes = bayes_rho_cd(&datasets[3])?;
    let inputs = [
        StudyInput::new(cd_fz.clone(), "study-1"),
        StudyInput::new(cd_bca.clone(), "study-2"),
        StudyInput::new(cd_prof.clone(), "study-3"),
        StudyInput::new(cd_bayes.clone(), "study-4"),
    ];
    let (cd_comb, _) = combiner.combine(&inputs)?;
    let cds = [&cd_fz, &cd_bca, &cd_prof, &cd_bayes, &cd_comb];
    let mut out = [(false, 0.0); 5];
    for (slot, cd) in out.iter_mut().zip(cds) {
        let iv = cd.interval(level)?;
        *slot = (iv.contains(rho0), iv.width());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statkit::numeric::simpson_uniform;

    fn toy_sample(seed: u64, n: usize, rho: f64) -> BivariateSample {
        let mut s = RngStream::new(seed);
        BivariateSample::new(sample_rows(&mut s, n, 0.0, 0.0, 1.0, 1.0, rho)).unwrap()
    }

    #[test]
    fn profile_peaks_at_the_sample_correlation() {
        let data = toy_sample(0xb1f0, 200, 0.7);
        let r = data.r();
        let cd = profile_rho_cd(&data).unwrap();
        // The profile likelihood maximizes at rho = r, so the CD median and
        // density mode should sit near r.
        let med = cd.quantile(0.5).unwrap();
        assert!((med - r).abs() < 0.05, "median {med} vs r {r}");
        let (grid, _) = cd.grid().unwrap();
        let mode = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                cd.density(*a).unwrap().total_cmp(&cd.density(*b).unwrap())
            })
            .unwrap();
        assert!((mode - r).abs() < 2e-3, "mode {mode} vs r {r}");
    }

    #[test]
    fn bayes_posterior_is_a_proper_distribution_near_r() {
        let data = toy_sample(0xbe11, 120, 0.6);
        let r = data.r();
        let cd = bayes_rho_cd(&data).unwrap();
        let (grid, _) = cd.grid().unwrap();
        let dens: Vec<f64> = grid.iter().map(|&t| cd.density(t).unwrap()).collect();
        let mass = simpson_uniform(&dens, grid[1] - grid[0]);
        assert!((mass - 1.0).abs() < 1e-6, "posterior mass {mass}");
        let med = cd.quantile(0.5).unwrap();
        assert!((med - r).abs() < 0.06, "median {med} vs r {r}");
        // The half-width pivot SD is about 1/sqrt(n), a loose large-sample check.
        let iv = cd.interval(0.95).unwrap();
        let approx = 2.0 * 1.96 * (1.0 - r * r) / (data.n() as f64).sqrt();
        assert!(
            (iv.width() / approx - 1.0).abs() < 0.25,
            "width {} vs large-sample {approx}",
            iv.width()
        );
    }

    #[test]
    fn desk_run_covers_and_the_combination_tightens() {
        let cfg = StudyConfig::bivariate_meta(100, 100, 0x00d5_0001);
        let report = run_bivariate_meta(&cfg).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.excluded, 0);
        let combined = &report.rows[4];
        assert_eq!(combined.method, "combined");
        for row in &report.rows {
            assert!(
                row.coverage >= 0.85 && row.coverage <= 1.0,
                "{} coverage {}",
                row.method,
                row.coverage
            );
            assert!(row.mean_length > 0.0 && row.length_sd >= 0.0);
        }
        for row in &report.rows[..4] {
            assert!(
                combined.mean_length < row.mean_length,
                "combined {} should beat {} {}",
                combined.mean_length,
                row.method,
                row.mean_length
            );
        }
    }

    #[test]
    fn reports_are_worker_order_independent_and_filtered() {
        let cfg = StudyConfig::bivariate_meta(100, 60, 0x00d5_0002);
        let a = run_bivariate_meta(&cfg).unwrap();
        let b = run_bivariate_meta(&cfg).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.coverage, y.coverage);
            assert_eq!(x.mean_length, y.mean_length);
            assert_eq!(x.length_sd, y.length_sd);
        }
        let picked = run_bivariate_meta(
            &StudyConfig::bivariate_meta(100, 60, 0x00d5_0002)
                .with_engines(&["profile", "combined"]),
        )
        .unwrap();
        let names: Vec<&str> = picked.rows.iter().map(|r| r.method.as_str()).collect();
        assert_eq!(names, ["profile", "combined"]);
        assert_eq!(picked.rows[0].coverage, a.rows[2].coverage);
    }

    #[test]
    fn fisher_z_and_profile_agree_at_large_n() {
        // Both are first-order accurate, so their medians converge.
        let data = toy_sample(0xfa9e, 400, 0.5);
        let fz = fisher_z_cd(&data).unwrap();
        let pr = profile_rho_cd(&data).unwrap();
        let (mf, mp) = (fz.quantile(0.5).unwrap(), pr.quantile(0.5).unwrap());
        assert!((mf - mp).abs() < 0.01, "medians {mf} vs {mp}");
        let wf = fz.interval(0.95).unwrap().width();
        let wp = pr.interval(0.95).unwrap().width();
        assert!((wf / wp - 1.0).abs() < 0.1, "widths {wf} vs {wp}");
    }

    #[test]
    fn wrong_study_and_bad_options_are_rejected() {
        let cauchy = StudyConfig::cauchy_abc(400, 40, 1);
        assert!(run_bivariate_meta(&cauchy).is_err());
        let cfg = StudyConfig::bivariate_meta(100, 60, 1);
        let bad = BivariateOptions { bootstrap_b: 100, combiner_points: 2001 };
        assert!(run_bivariate_meta_with(&cfg, bad).is_err());
        let degenerate =
            BivariateSample::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert!(profile_rho_cd(&degenerate).is_err());
        assert!(bayes_rho_cd(&degenerate).is_err());
    }
}
