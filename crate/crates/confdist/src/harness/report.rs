//! Report emission: a fixed-format coverage CSV plus a metadata JSON sidecar.
//!
//! The CSV holds only seed-determined numbers at three decimals, so repeated
//! runs with one seed produce byte-identical files. Everything environment
//! dependent (runtime, library version) lives in the sidecar.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::harness::{CoverageReport, StudyConfig};

/// Renders the coverage table as `method,coverage,mean_length,length_sd`.
pub fn coverage_csv(report: &CoverageReport) -> String {
    let mut s = String::from("method,coverage,mean_length,length_sd\n");
    for row in &report.rows {
        s.push_str(&format!(
            "{},{:.3},{:.3},{:.3}\n",
            row.method, row.coverage, row.mean_length, row.length_sd
        ));
    }
    s
}

/// Renders the metadata sidecar. Keys are emitted in sorted order, so the
/// layout is stable even though the runtime value is not. `options` carries
/// runner tuning knobs (bootstrap size, tolerance, grid points).
pub fn metadata_json(
    report: &CoverageReport,
    cfg: &StudyConfig,
    options: &[(&str, f64)],
) -> String {
    let opts: serde_json::Map<String, serde_json::Value> = options
        .iter()
        .map(|&(k, v)| (k.to_string(), serde_json::json!(v)))
        .collect();
    let value = serde_json::json!({
        "study": report.study,
        "seed": report.seed,
        "replications": report.replications,
        "excluded": report.excluded,
        "n": cfg.n,
        "level": cfg.level,
        "true_params": cfg.true_params,
        "engines": cfg.engines,
        "options": opts,
        "runtime_seconds": report.runtime_seconds,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut s =
        serde_json::to_string_pretty(&value).expect("static json shape always serializes");
    s.push('\n');
    s
}

/// Writes `coverage.csv` and `metadata.json` into `dir`, creating it first.
pub fn emit(
    report: &CoverageReport,
    cfg: &StudyConfig,
    options: &[(&str, f64)],
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("coverage.csv"), coverage_csv(report))?;
    fs::write(dir.join("metadata.json"), metadata_json(report, cfg, options))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{MethodRow, Study};

    fn toy_report() -> CoverageReport {
        CoverageReport {
            study: Study::CauchyAbc.name().into(),
            rows: vec![
                MethodRow {
                    method: "abc-mean".into(),
                    coverage: 0.9345,
                    mean_length: 25.4118,
                    length_sd: 11.2029,
                },
                MethodRow {
                    method: "posterior".into(),
                    coverage: 0.96,
                    mean_length: 0.8971,
                    length_sd: 0.1503,
                },
            ],
            replications: 400,
            excluded: 1,
            seed: 7,
            runtime_seconds: 12.5,
        }
    }

    #[test]
    fn csv_uses_three_decimals_and_a_fixed_header() {
        let csv = coverage_csv(&toy_report());
        assert_eq!(
            csv,
            "method,coverage,mean_length,length_sd\n\
             abc-mean,0.934,25.412,11.203\n\
             posterior,0.960,0.897,0.150\n"
        );
    }

    #[test]
    fn metadata_round_trips_and_keeps_runtime_out_of_the_csv() {
        let report = toy_report();
        let cfg = StudyConfig::cauchy_abc(400, 40, 7);
        let meta = metadata_json(&report, &cfg, &[("draws", 500.0)]);
        let parsed: serde_json::Value = serde_json::from_str(&meta).unwrap();
        assert_eq!(parsed["study"], "cauchy-abc");
        assert_eq!(parsed["seed"], 7);
        assert_eq!(parsed["excluded"], 1);
        assert_eq!(parsed["true_params"]["theta"], 10.0);
        assert_eq!(parsed["options"]["draws"], 500.0);
        assert!(parsed["runtime_seconds"].as_f64().unwrap() > 0.0);
        assert!(!coverage_csv(&report).contains("12.5"));
    }

    #[test]
    fn emit_writes_both_files() {
        let dir = std::env::temp_dir().join("confdist_harness_report_test");
        let _ = fs::remove_dir_all(&dir);
        let report = toy_report();
        let cfg = StudyConfig::cauchy_abc(400, 40, 7);
        emit(&report, &cfg, &[], &dir).unwrap();
        let csv = fs::read_to_string(dir.join("coverage.csv")).unwrap();
        assert!(csv.starts_with("method,coverage,mean_length,length_sd\n"));
        let meta = fs::read_to_string(dir.join("metadata.json")).unwrap();
        assert!(meta.contains("\"replications\": 400"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
