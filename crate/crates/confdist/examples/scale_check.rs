use confdist::harness::{bivariate, cauchy, report, StudyConfig};
use confdist::invert::models::{cauchy_location, CauchySummary};
use confdist::invert::{abc_draws, default_epsilon, flat_prior};
use confdist::RngStream;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "bivariate".into());
    let reps: usize = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0xc0ffee);
    match which.as_str() {
        "bivariate" => {
            let cfg = StudyConfig::bivariate_meta(500, 200, seed);
            let rep = bivariate::run_bivariate_meta(&cfg).unwrap();
            print!("{}", report::coverage_csv(&rep));
            let individuals: f64 =
                rep.rows[..4].iter().map(|r| r.mean_length).sum::<f64>() / 4.0;
            println!("ratio,{:.4}", rep.rows[4].mean_length / individuals);
            println!("runtime_seconds,{:.2}", rep.runtime_seconds);
            println!("excluded,{}", rep.excluded);
        }
        "cauchy" => {
            let cfg = StudyConfig::cauchy_abc(reps, 40, seed);
            let rep = cauchy::run_cauchy_abc(&cfg).unwrap();
            print!("{}", report::coverage_csv(&rep));
            println!("runtime_seconds,{:.2}", rep.runtime_seconds);
            println!("excluded,{}", rep.excluded);
        }
        "bench" => bench(seed),
        other => panic!("unknown mode {other}"),
    }
}

fn bench(seed: u64) {
    let n = 40usize;
    let root = RngStream::new(seed);
    let mut gen = root.substream(0);
    let data: Vec<f64> = (0..n)
        .map(|_| 10.0 + (std::f64::consts::PI * (gen.uniform() - 0.5)).tan())
        .collect();
    let eps = default_epsilon(&data).unwrap();

    // raw tan loop, no allocation
    let mut s = root.substream(99);
    let iters = 2_000_000u64;
    let t0 = Instant::now();
    let mut acc = 0.0f64;
    for _ in 0..iters {
        acc += (std::f64::consts::PI * (s.uniform() - 0.5)).tan();
    }
    let raw = t0.elapsed().as_secs_f64();
    println!("raw uniform+tan: {:.1} ns/draw (acc {acc:.3})", raw * 1e9 / iters as f64);

    // fused attempt loop, no allocation: theta draw + n tans + running mean
    let mut s = root.substream(98);
    let attempts = 200_000u64;
    let t0 = Instant::now();
    let mut kept = 0u64;
    let mean_obs: f64 = data.iter().sum::<f64>() / n as f64;
    let (lo, hi) = (mean_obs - 30.0, mean_obs + 30.0);
    for _ in 0..attempts {
        let theta = lo + (hi - lo) * s.uniform();
        let mut sum = 0.0;
        for _ in 0..n {
            sum += theta + (std::f64::consts::PI * (s.uniform() - 0.5)).tan();
        }
        if (sum / n as f64 - mean_obs).abs() < eps {
            kept += 1;
        }
    }
    let fused = t0.elapsed().as_secs_f64();
    println!(
        "fused mean attempt: {:.0} ns/attempt (kept {kept})",
        fused * 1e9 / attempts as f64
    );

    // current abc_draws path, mean summary
    for (label, summary, m) in [
        ("abc mean", CauchySummary::Mean, 120usize),
        ("abc median", CauchySummary::Median, 120usize),
    ] {
        let (prior, _) = flat_prior(mean_obs, &data).unwrap();
        let model = cauchy_location(n, (f64::NEG_INFINITY, f64::INFINITY), summary);
        let mut es = root.substream(97);
        let t0 = Instant::now();
        let d = abc_draws(&model, &data, &prior, m, eps, &mut es).unwrap();
        let el = t0.elapsed().as_secs_f64();
        let att = m as f64 / d.acceptance_rate.unwrap();
        println!(
            "{label}: {:.0} ns/attempt ({:.0} attempts, rate {:.2e})",
            el * 1e9 / att,
            att,
            d.acceptance_rate.unwrap()
        );
    }
}
