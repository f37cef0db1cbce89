//! confdist: build, combine, invert, and stress-test confidence distributions
//! from the command line.
//!
//! Data files are whitespace- or comma-separated reals; paired and bivariate
//! inputs take two values per line. Blank lines and lines starting with `#`
//! are skipped. All stochastic commands take `--seed` and are fully
//! reproducible from it.

mod config;
mod input;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use confdist::build::{
    fisher_z_cd, mann_whitney_cd, neyman_scott_cd, normal_mean_cd, BivariateSample,
    PairedSample, TwoSample,
};
use confdist::cd::io::{fmt_f64, read_cd_csv};
use confdist::cd::ConfDist;
use confdist::combine::{Combiner, CombinerSpec, GcMethod, Mapping, StudyInput};
use confdist::harness::{bivariate, cauchy, report, run_billiard, run_matching_suite};
use confdist::harness::{run_uniformity_suite, Study, StudyConfig};
use confdist::invert::{
    abc_draws, bootstrap_draws, default_epsilon, flat_prior, gfi_draws, models, robust_scale,
    write_draws_csv, write_draws_meta, InversionDraws,
};
use confdist::statkit::numeric::{linspace, simpson_uniform};
use confdist::statkit::stats;
use confdist::RngStream;

use config::ConfigFile;
use input::{read_pairs, read_reals};

#[derive(Parser)]
#[command(
    name = "confdist",
    version,
    about = "Confidence distributions: constructors, combining, inversion engines, and coverage studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a CD from data and evaluate, trace, or invert it.
    Cd(CdArgs),
    /// Combine gridded CD files into a single CD.
    Combine(CombineArgs),
    /// Flat-prior ABC draws for a location parameter.
    Abc(AbcArgs),
    /// Generalized fiducial draws by repeated data-matching solves.
    Gfi(GfiArgs),
    /// Bootstrap draws of a statistic.
    Bootstrap(BootstrapArgs),
    /// Coverage studies with deterministic seeding and CSV/JSON reports.
    Simulate(SimulateArgs),
    /// Flat-prior binomial posterior for a success probability.
    Billiard(BilliardArgs),
    /// Invariant suites; exits nonzero if any check fails.
    Suite(SuiteArgs),
}

fn main() -> Result<()> {
    // Rust ignores SIGPIPE by default, which turns `confdist ... | head` into
    // a panic; restore the conventional quiet death on a closed pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match Cli::parse().command {
        Command::Cd(args) => run_cd(args),
        Command::Combine(args) => run_combine(args),
        Command::Abc(args) => run_abc(args),
        Command::Gfi(args) => run_gfi(args),
        Command::Bootstrap(args) => run_bootstrap(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Billiard(args) => run_billiard_cmd(args),
        Command::Suite(args) => run_suite(args),
    }
}

// ---------------------------------------------------------------- cd

#[derive(Args)]
struct CdArgs {
    #[command(subcommand)]
    action: CdAction,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constructor {
    /// Normal mean with unit variance (reals).
    NormalMean,
    /// Common variance of paired observations (two per line).
    NeymanScott,
    /// Correlation via the Fisher-z pivot (two per line).
    FisherZ,
    /// Correlation via the profile likelihood (two per line).
    ProfileRho,
    /// Correlation via the flat-prior posterior (two per line).
    BayesRho,
    /// Location shift between two samples; needs --data2.
    MannWhitney,
    /// Read an existing theta,H table instead of raw data.
    File,
}

#[derive(Args)]
struct CdInput {
    /// How to turn the data into a CD.
    #[arg(long, value_enum)]
    constructor: Constructor,
    /// Data file (or theta,H table for --constructor file).
    #[arg(long)]
    data: PathBuf,
    /// Second sample, for mann-whitney only.
    #[arg(long)]
    data2: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CdAction {
    /// Evaluate H: `theta,H` at the requested points, or the full table
    /// (fit for `combine --cd`) when no --at is given.
    Eval {
        #[command(flatten)]
        input: CdInput,
        /// Evaluation point; repeatable. Omit to dump the whole table.
        #[arg(long = "at")]
        at: Vec<f64>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace points for CDs without a native grid.
        #[arg(long, default_value_t = 513)]
        grid: usize,
    },
    /// Write the confidence curve as a `theta,CV` table.
    Curve {
        #[command(flatten)]
        input: CdInput,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace points for CDs without a native grid.
        #[arg(long, default_value_t = 513)]
        grid: usize,
    },
    /// Print the central two-sided interval as `level,lo,hi`.
    Interval {
        #[command(flatten)]
        input: CdInput,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
}

fn build_cd(input: &CdInput) -> Result<ConfDist> {
    let cd = match input.constructor {
        Constructor::NormalMean => normal_mean_cd(&read_reals(&input.data)?)?,
        Constructor::NeymanScott => {
            neyman_scott_cd(&PairedSample::new(read_pairs(&input.data)?)?)?
        }
        Constructor::FisherZ => fisher_z_cd(&BivariateSample::new(read_pairs(&input.data)?)?)?,
        Constructor::ProfileRho => {
            bivariate::profile_rho_cd(&BivariateSample::new(read_pairs(&input.data)?)?)?
        }
        Constructor::BayesRho => {
            bivariate::bayes_rho_cd(&BivariateSample::new(read_pairs(&input.data)?)?)?
        }
        Constructor::MannWhitney => {
            let second = input
                .data2
                .as_ref()
                .context("mann-whitney needs --data2 with the second sample")?;
            let two = TwoSample::new(read_reals(&input.data)?, read_reals(second)?)?;
            let (cd, _) = mann_whitney_cd(&two, None)?;
            cd
        }
        Constructor::File => read_cd_csv(&input.data)?,
    };
    Ok(cd)
}

fn run_cd(args: CdArgs) -> Result<()> {
    match args.action {
        CdAction::Eval { input, at, out, grid } => {
            let cd = build_cd(&input)?;
            let text = if at.is_empty() {
                trace_text(&cd, grid, "theta,H", |t| cd.eval(t))?
            } else {
                let mut s = String::from("theta,H\n");
                for t in at {
                    s.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(cd.eval(t))));
                }
                s
            };
            write_out(&text, out.as_deref())?;
        }
        CdAction::Curve { input, out, grid } => {
            let cd = build_cd(&input)?;
            let text = trace_text(&cd, grid, "theta,CV", |t| cd.curve(t))?;
            write_out(&text, out.as_deref())?;
        }
        CdAction::Interval { input, level } => {
            let cd = build_cd(&input)?;
            let iv = cd.interval(level)?;
            println!("level,lo,hi");
            println!("{},{},{}", fmt_f64(level), fmt_f64(iv.lo), fmt_f64(iv.hi));
        }
    }
    Ok(())
}

/// Tabulates `f` on the CD's own grid, or on a window holding all but 2e-4
/// of confidence mass for CDs without one.
fn trace_text(
    cd: &ConfDist,
    points: usize,
    header: &str,
    f: impl Fn(f64) -> f64,
) -> Result<String> {
    let mut s = format!("{header}\n");
    let knots: Vec<f64> = match cd.grid() {
        Some((theta, _)) => theta.to_vec(),
        None => linspace(cd.quantile(1e-4)?, cd.quantile(1.0 - 1e-4)?, points.max(2)),
    };
    for t in knots {
        s.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(f(t))));
    }
    Ok(s)
}

fn write_out(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------- combine

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    /// Laplace quantile sum; reference law by cached Monte Carlo.
    Laplace,
    /// Normal quantile sum; reference law in closed form.
    Normal,
}

#[derive(Args)]
struct CombineArgs {
    /// Gridded CD file (theta,H); repeat once per study, at least twice.
    #[arg(long = "cd", required = true)]
    cds: Vec<PathBuf>,
    /// Combination grid points, spread over the intersection of the input
    /// ranges. Default: the first input's own grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = MappingArg::Laplace)]
    mapping: MappingArg,
    /// Output file for the combined theta,H table (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_combine(args: CombineArgs) -> Result<()> {
    if args.cds.len() < 2 {
        bail!("combining needs at least two --cd files");
    }
    let mut inputs = Vec::new();
    for path in &args.cds {
        let cd = read_cd_csv(path).with_context(|| format!("reading {}", path.display()))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        inputs.push(StudyInput::new(cd, label));
    }
    let grid = match args.grid {
        Some(points) => {
            if points < 9 {
                bail!("--grid needs at least 9 points");
            }
            let lo = inputs
                .iter()
                .map(|s| s.cd.grid().expect("file CDs are gridded").0[0])
                .fold(f64::NEG_INFINITY, f64::max);
            let hi = inputs
                .iter()
                .map(|s| {
                    let theta = s.cd.grid().expect("file CDs are gridded").0;
                    theta[theta.len() - 1]
                })
                .fold(f64::INFINITY, f64::min);
            if !(lo < hi) {
                bail!("input grids do not overlap; cannot build a combination grid");
            }
            linspace(lo, hi, points)
        }
        None => inputs[0].cd.grid().expect("file CDs are gridded").0.to_vec(),
    };
    let mut spec = CombinerSpec::new(inputs.len(), grid);
    if matches!(args.mapping, MappingArg::Normal) {
        spec = spec.with_mapping(Mapping::NormalQuantileSum).with_gc_method(GcMethod::ClosedForm);
    }
    let combiner = Combiner::new(spec)?;
    let (combined, clamped) = combiner.combine(&inputs)?;
    if clamped {
        eprintln!("note: some study CD values were clamped away from 0/1 before mapping");
    }
    emit_cd(&combined, args.out.as_deref())?;
    Ok(())
}

fn emit_cd(cd: &ConfDist, out: Option<&Path>) -> Result<()> {
    let text = trace_text(cd, 0, "theta,H", |t| cd.eval(t))?;
    write_out(&text, out)
}

// ---------------------------------------------------------------- engines

#[derive(Clone, Copy, ValueEnum)]
enum AbcModel {
    /// Cauchy location, mean summary.
    CauchyMean,
    /// Cauchy location, median summary.
    CauchyMedian,
    /// Normal location with unit variance, mean summary.
    NormalMean,
}

#[derive(Args)]
struct AbcArgs {
    /// Observations, whitespace separated.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    model: AbcModel,
    /// Accepted draws to collect.
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    /// Acceptance tolerance; default 0.05 * robust scale / sqrt(n).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for draws.csv and draws.meta (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_abc(args: AbcArgs) -> Result<()> {
    let data = read_reals(&args.data)?;
    let n = data.len();
    let space = (f64::NEG_INFINITY, f64::INFINITY);
    let (model, center) = match args.model {
        AbcModel::CauchyMean => {
            (models::cauchy_location(n, space, models::CauchySummary::Mean), stats::mean(&data))
        }
        AbcModel::CauchyMedian => (
            models::cauchy_location(n, space, models::CauchySummary::Median),
            stats::median(&data),
        ),
        AbcModel::NormalMean => (models::normal_location(n, space), stats::mean(&data)),
    };
    let (prior, prior_note) = flat_prior(center, &data)?;
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => default_epsilon(&data)?,
    };
    let mut stream = RngStream::new(args.seed);
    let mut draws = abc_draws(&model, &data, &prior, args.draws, epsilon, &mut stream)?;
    draws.notes.push(prior_note);
    emit_draws(&draws, args.out.as_deref())
}

#[derive(Args)]
struct GfiArgs {
    /// Observations, whitespace separated.
    #[arg(long)]
    data: PathBuf,
    /// Accepted draws to collect.
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    /// Residual tolerance for the data-matching solve. The supported model
    /// (normal location, unit variance, summary form) solves exactly, so the
    /// default only guards the optimizer.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for draws.csv and draws.meta (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_gfi(args: GfiArgs) -> Result<()> {
    let data = read_reals(&args.data)?;
    let ybar = stats::mean(&data);
    let scale = robust_scale(&data)?;
    let model =
        models::normal_location_reduced(data.len(), (ybar - 20.0 * scale, ybar + 20.0 * scale));
    let mut stream = RngStream::new(args.seed);
    let draws = gfi_draws(&model, &[ybar], args.draws, args.epsilon, &mut stream)?;
    emit_draws(&draws, args.out.as_deref())
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Mean,
    Median,
}

#[derive(Args)]
struct BootstrapArgs {
    /// Observations, whitespace separated.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = StatArg::Mean)]
    stat: StatArg,
    /// Resamples to draw.
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for draws.csv and draws.meta (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_bootstrap(args: BootstrapArgs) -> Result<()> {
    let data = read_reals(&args.data)?;
    let mut stream = RngStream::new(args.seed);
    let draws = match args.stat {
        StatArg::Mean => bootstrap_draws(&data, stats::mean::<f64>, args.draws, &mut stream)?,
        StatArg::Median => bootstrap_draws(&data, stats::median::<f64>, args.draws, &mut stream)?,
    };
    emit_draws(&draws, args.out.as_deref())
}

fn emit_draws(draws: &InversionDraws, out: Option<&Path>) -> Result<()> {
    if let Some(rate) = draws.acceptance_rate {
        eprintln!("acceptance_rate={}", fmt_f64(rate));
    }
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_draws_csv(draws, dir.join("draws.csv"))?;
            write_draws_meta(draws, dir.join("draws.meta"))?;
        }
        None => {
            println!("theta_star");
            for &d in &draws.draws {
                println!("{}", fmt_f64(d));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- simulate

#[derive(Args)]
struct SimulateArgs {
    #[command(subcommand)]
    study: SimulateStudy,
}

#[derive(Subcommand)]
enum SimulateStudy {
    /// Correlation meta-analysis: four studies, one CD method each, combined.
    BivariateMeta(SimArgs),
    /// Cauchy location: ABC under two summaries vs the exact posterior.
    CauchyAbc(SimArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Replications (default: 500 bivariate-meta, 400 cauchy-abc).
    #[arg(long)]
    reps: Option<usize>,
    /// Observations per dataset (default: 200 bivariate-meta, 40 cauchy-abc).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    level: Option<f64>,
    /// Methods to report, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    engines: Vec<String>,
    /// True parameter override, e.g. rho=0.5; repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
    /// ABC tolerance (cauchy-abc; default 0.05 * robust scale / sqrt(n)).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Accepted ABC draws per engine and replication (cauchy-abc).
    #[arg(long)]
    draws: Option<usize>,
    /// Bootstrap resamples per replication (bivariate-meta).
    #[arg(long)]
    bootstrap_b: Option<usize>,
    /// Grid points: the combination grid (bivariate-meta) or the posterior
    /// grid (cauchy-abc).
    #[arg(long)]
    grid: Option<usize>,
    /// Flat key=value file supplying defaults for the flags above;
    /// explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for coverage.csv and metadata.json; the table also goes to
    /// stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let (study, sim) = match args.study {
        SimulateStudy::BivariateMeta(sim) => (Study::BivariateMeta, sim),
        SimulateStudy::CauchyAbc(sim) => (Study::CauchyAbc, sim),
    };
    let file = ConfigFile::load(sim.config.as_deref())?;
    let reps = file.pick("reps", sim.reps, if study == Study::BivariateMeta { 500 } else { 400 })?;
    let n = file.pick("n", sim.n, if study == Study::BivariateMeta { 200 } else { 40 })?;
    let seed = file.pick("seed", sim.seed, 0)?;
    let level = file.pick("level", sim.level, 0.95)?;
    let engines = if sim.engines.is_empty() { file.list("engines") } else { sim.engines.clone() };

    let mut cfg = match study {
        Study::BivariateMeta => StudyConfig::bivariate_meta(reps, n, seed),
        Study::CauchyAbc => StudyConfig::cauchy_abc(reps, n, seed),
    };
    cfg.level = level;
    cfg.engines = engines;
    for (key, value) in file.params()?.into_iter().chain(parse_params(&sim.params)?) {
        cfg.true_params.insert(key, value);
    }

    let (report, options) = match study {
        Study::BivariateMeta => {
            let opts = bivariate::BivariateOptions {
                bootstrap_b: file.pick("bootstrap_b", sim.bootstrap_b, 1000)?,
                combiner_points: file.pick("grid", sim.grid, 2001)?,
            };
            let report = bivariate::run_bivariate_meta_with(&cfg, opts)?;
            let options = vec![
                ("bootstrap_b", opts.bootstrap_b as f64),
                ("combiner_points", opts.combiner_points as f64),
            ];
            (report, options)
        }
        Study::CauchyAbc => {
            let opts = cauchy::CauchyOptions {
                draws: file.pick("draws", sim.draws, 500)?,
                epsilon: match sim.epsilon {
                    Some(e) => Some(e),
                    None => file.maybe("epsilon")?,
                },
                posterior_points: file.pick("grid", sim.grid, 2001)?,
            };
            let report = cauchy::run_cauchy_abc_with(&cfg, opts)?;
            let mut options = vec![
                ("draws", opts.draws as f64),
                ("posterior_points", opts.posterior_points as f64),
            ];
            if let Some(e) = opts.epsilon {
                options.push(("epsilon", e));
            }
            (report, options)
        }
    };

    print!("{}", report::coverage_csv(&report));
    eprintln!(
        "replications={} excluded={} runtime_seconds={:.2}",
        report.replications, report.excluded, report.runtime_seconds
    );
    if let Some(dir) = &sim.out {
        report::emit(&report, &cfg, &options, dir)?;
    }
    Ok(())
}

fn parse_params(entries: &[String]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for entry in entries {
        let (key, value) = entry
            .split_once('=')
            .with_context(|| format!("--param needs name=value, got '{entry}'"))?;
        let value: f64 =
            value.parse().with_context(|| format!("--param {key}: bad number '{value}'"))?;
        out.push((key.trim().to_string(), value));
    }
    Ok(out)
}

// ---------------------------------------------------------------- billiard

#[derive(Args)]
struct BilliardArgs {
    /// Observed successes.
    successes: u64,
    /// Number of trials.
    trials: u64,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Output file for the theta,H table (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_billiard_cmd(args: BilliardArgs) -> Result<()> {
    let cd = run_billiard(args.successes, args.trials)?;
    let (grid, _) = cd.grid().expect("billiard CD is gridded");
    let dens: Vec<f64> = grid
        .iter()
        .map(|&p| cd.density(p))
        .collect::<confdist::Result<_>>()?;
    let weighted: Vec<f64> = grid.iter().zip(&dens).map(|(&p, &d)| p * d).collect();
    let mean = simpson_uniform(&weighted, grid[1] - grid[0]);
    let iv = cd.interval(args.level)?;
    eprintln!(
        "posterior_mean={} level={} lo={} hi={}",
        fmt_f64(mean),
        fmt_f64(args.level),
        fmt_f64(iv.lo),
        fmt_f64(iv.hi)
    );
    emit_cd(&cd, args.out.as_deref())
}

// ---------------------------------------------------------------- suite

#[derive(Args)]
struct SuiteArgs {
    #[command(subcommand)]
    which: SuiteKind,
}

#[derive(Subcommand)]
enum SuiteKind {
    /// Check that H(theta0) is uniform across replications.
    Uniformity {
        /// normal-mean, neyman-scott, or fisher-z; all three when omitted.
        #[arg(long)]
        constructor: Option<String>,
        /// True parameter (default per constructor).
        #[arg(long)]
        theta0: Option<f64>,
        /// Observations (or pairs) per replication (default per constructor).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check artificial vs sampling randomness agreement for every engine.
    Matching {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run_suite(args: SuiteArgs) -> Result<()> {
    let mut failures = 0usize;
    match args.which {
        SuiteKind::Uniformity { constructor, theta0, n, reps, seed } => {
            // Defaults chosen so every row runs in seconds: exact pivots at
            // moderate n, the asymptotic pivot at the n its band is rated for.
            let defaults: [(&str, f64, usize); 3] = [
                ("normal-mean", 0.0, 50),
                ("neyman-scott", 1.0, 100),
                ("fisher-z", 0.723, 200),
            ];
            let rows: Vec<(String, f64, usize)> = match constructor {
                Some(name) => {
                    let (_, d_theta, d_n) = defaults
                        .iter()
                        .find(|(c, _, _)| *c == name)
                        .with_context(|| format!("unknown constructor '{name}'"))?;
                    vec![(name, theta0.unwrap_or(*d_theta), n.unwrap_or(*d_n))]
                }
                None => defaults
                    .iter()
                    .map(|&(c, t, m)| (c.to_string(), theta0.unwrap_or(t), n.unwrap_or(m)))
                    .collect(),
            };
            let root = RngStream::new(seed);
            println!("constructor,theta0,n,replications,ks,bound,pass");
            for (i, (name, t0, m)) in rows.iter().enumerate() {
                let mut stream = root.substream(i as u64);
                let s = run_uniformity_suite(name, *t0, *m, reps, &mut stream)?;
                println!(
                    "{},{},{},{},{:.4},{:.4},{}",
                    s.constructor, fmt_f64(s.theta0), s.n, s.replications, s.ks_distance,
                    s.bound, s.pass
                );
                failures += usize::from(!s.pass);
            }
        }
        SuiteKind::Matching { seed } => {
            println!("engine,n,ks,bound,pass");
            for row in run_matching_suite(seed)? {
                println!(
                    "{},{},{:.4},{:.4},{}",
                    row.report.engine.name(),
                    row.report.n,
                    row.report.ks_distance,
                    row.bound,
                    row.pass
                );
                failures += usize::from(!row.pass);
            }
        }
    }
    if failures > 0 {
        bail!("{failures} suite check(s) failed");
    }
    Ok(())
}
