//! Coverage study for the Cauchy location: CDs built from ABC draws under two
//! summaries against the exact flat-prior posterior.
//!
//! Each replication draws one heavy-tailed dataset; the mean summary is not
//! consistent here (the mean of n standard-Cauchy errors is standard Cauchy
//! again), so its intervals stay wide at any n while the median summary and
//! the exact posterior concentrate. Coverage should hold for all three.

use std::time::Instant;

use rayon::prelude::*;

use crate::build::{normalized_likelihood_cd, GridWindow};
use crate::error::{Error, Result};
use crate::harness::{apply_failure_cap, summarize_method, CoverageReport, Study, StudyConfig};
use crate::invert::{abc_draws, default_epsilon, draws_to_cd, flat_prior, models};
use crate::statkit::{stats, RngStream};

/// Tuning knobs with desk-scale defaults.
#[derive(Clone, Copy, Debug)]
pub struct CauchyOptions {
    /// Accepted ABC draws per engine per replication.
    pub draws: usize,
    /// ABC tolerance; None applies the default rule 0.05 * scale / sqrt(n).
    pub epsilon: Option<f64>,
    /// Grid points for the exact posterior.
    pub posterior_points: usize,
}

impl Default for CauchyOptions {
    fn default() -> Self {
        CauchyOptions { draws: 500, epsilon: None, posterior_points: 2001 }
    }
}

/// Runs the Cauchy location coverage study with default options.
pub fn run_cauchy_abc(cfg: &StudyConfig) -> Result<CoverageReport> {
    run_cauchy_abc_with(cfg, CauchyOptions::default())
}

/// Runs the Cauchy location coverage study. Replication i uses substream i of
/// the master seed, with fixed inner substreams per engine, so a report row
/// is unchanged by which other engines run alongside it.
pub fn run_cauchy_abc_with(cfg: &StudyConfig, opts: CauchyOptions) -> Result<CoverageReport> {
    cfg.validate()?;
    if cfg.study != Study::CauchyAbc {
        return Err(Error::Invalid(format!(
            "config is for study {}, not cauchy-abc",
            cfg.study.name()
        )));
    }
    // The empirical CD needs 500 draws, so anything less cannot finish.
    if opts.draws < 500 || opts.posterior_points < 101 {
        return Err(Error::ParameterDomain(
            "need draws >= 500 and posterior_points >= 101".into(),
        ));
    }
    if let Some(e) = opts.epsilon {
        if !(e > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "epsilon must be positive, got {e}"
            )));
        }
    }
    let start = Instant::now();
    let theta0 = cfg.param("theta").unwrap_or(10.0);
    let level = cfg.level;
    let methods = Study::CauchyAbc.methods();
    let wants = [cfg.wants(methods[0]), cfg.wants(methods[1]), cfg.wants(methods[2])];
    let root = RngStream::new(cfg.master_seed);

    let results: Vec<Result<[Option<(bool, f64)>; 3]>> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| replicate(&root.substream(i as u64), cfg.n, theta0, level, opts, wants))
        .collect();
    let (kept, excluded) = apply_failure_cap(results, cfg.replications)?;

    let mut rows = Vec::new();
    for (idx, method) in methods.iter().enumerate() {
        if !wants[idx] {
            continue;
        }
        let hits = kept.iter().filter(|r| r[idx].is_some_and(|(hit, _)| hit)).count();
        let lengths: Vec<f64> =
            kept.iter().filter_map(|r| r[idx].map(|(_, w)| w)).collect();
        rows.push(summarize_method(method, hits, &lengths));
    }
    Ok(CoverageReport {
        study: Study::CauchyAbc.name().into(),
        rows,
        replications: cfg.replications,
        excluded,
        seed: cfg.master_seed,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn replicate(
    rep: &RngStream,
    n: usize,
    theta0: f64,
    level: f64,
    opts: CauchyOptions,
    wants: [bool; 3],
) -> Result<[Option<(bool, f64)>; 3]> {
    let mut gen = rep.substream(0);
    let data: Vec<f64> = (0..n)
        .map(|_| theta0 + (std::f64::consts::PI * (gen.uniform() - 0.5)).tan())
        .collect();
    let epsilon = match opts.epsilon {
        Some(e) => e,
        None => default_epsilon(&data)?,
    };
    let mut out = [None; 3];
    let summaries = [models::CauchySummary::Mean, models::CauchySummary::Median];
    for (idx, summary) in summaries.into_iter().enumerate() {
        if !wants[idx] {
            continue;
        }
        let center = match summary {
            models::CauchySummary::Mean => stats::mean(&data),
            models::CauchySummary::Median => stats::median(&data),
        };
        let (prior, _) = flat_prior(center, &data)?;
        let model = models::cauchy_location(n, (f64::NEG_INFINITY, f64::INFINITY), summary);
        let mut engine_s = rep.substream(1 + idx as u64);
        let draws = abc_draws(&model, &data, &prior, opts.draws, epsilon, &mut engine_s)?;
        let iv = draws_to_cd(&draws)?.interval(level)?;
        out[idx] = Some((iv.contains(theta0), iv.width()));
    }
    if wants[2] {
        let med = stats::median(&data);
        let loglik = |t: f64| {
            -data
                .iter()
                .map(|&y| {
                    let d = y - t;
                    (1.0 + d * d).ln()
                })
                .sum::<f64>()
        };
        let cd = normalized_likelihood_cd(
            loglik,
            GridWindow::new(med - 2.0, med + 2.0).with_points(opts.posterior_points),
            "cauchy location (flat-prior posterior)",
            format!("exact flat-prior Cauchy posterior, n = {n}"),
        )?;
        let iv = cd.interval(level)?;
        out[2] = Some((iv.contains(theta0), iv.width()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_run_reports_all_rows_and_filters_consistently() {
        // Widened tolerance keeps this a mechanics check; the statistical
        // targets run at full scale elsewhere.
        let opts =
            CauchyOptions { draws: 500, epsilon: Some(0.8), posterior_points: 1001 };
        let cfg = StudyConfig::cauchy_abc(100, 20, 0x00ca_0001);
        let full = run_cauchy_abc_with(&cfg, opts).unwrap();
        assert_eq!(full.rows.len(), 3);
        assert_eq!(full.excluded, 0);
        let names: Vec<&str> = full.rows.iter().map(|r| r.method.as_str()).collect();
        assert_eq!(names, ["abc-mean", "abc-median", "posterior"]);
        for row in &full.rows {
            assert!(
                row.coverage >= 0.8 && row.coverage <= 1.0,
                "{} coverage {}",
                row.method,
                row.coverage
            );
            assert!(row.mean_length > 0.0);
        }
        // The mean summary is inconsistent for Cauchy data, so its intervals
        // dwarf the median summary's.
        assert!(full.rows[0].mean_length > 4.0 * full.rows[1].mean_length);

        // Restricting to the posterior must reproduce the full run's row.
        let only = run_cauchy_abc_with(
            &StudyConfig::cauchy_abc(100, 20, 0x00ca_0001).with_engines(&["posterior"]),
            opts,
        )
        .unwrap();
        assert_eq!(only.rows.len(), 1);
        assert_eq!(only.rows[0].coverage, full.rows[2].coverage);
        assert_eq!(only.rows[0].mean_length, full.rows[2].mean_length);

        // Same seed, same report; the runtime is the only nondeterministic field.
        let again = run_cauchy_abc_with(&cfg, opts).unwrap();
        for (a, b) in full.rows.iter().zip(&again.rows) {
            assert_eq!(a.coverage, b.coverage);
            assert_eq!(a.mean_length, b.mean_length);
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let bivariate = StudyConfig::bivariate_meta(500, 200, 1);
        assert!(run_cauchy_abc(&bivariate).is_err());
        let cfg = StudyConfig::cauchy_abc(100, 20, 1);
        let bad = CauchyOptions { draws: 10, ..CauchyOptions::default() };
        assert!(run_cauchy_abc_with(&cfg, bad).is_err());
        let bad = CauchyOptions { epsilon: Some(0.0), ..CauchyOptions::default() };
        assert!(run_cauchy_abc_with(&cfg, bad).is_err());
    }
}
