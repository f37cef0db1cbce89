//! CSV serialization of confidence distributions and curves.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::cd::{ConfDist, Edge};
use crate::error::{Error, Result};
use crate::statkit::numeric::linspace;

/// Format a float so that reading it back reproduces the exact bits.
/// Rust's shortest-round-trip Display already guarantees this.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn eval_grid(cd: &ConfDist, points: usize) -> Result<Vec<(f64, f64)>> {
    if let Some((theta, h)) = cd.grid() {
        return Ok(theta.iter().copied().zip(h.iter().copied()).collect());
    }
    // Analytic or empirical: evaluate on a window covering all but 1e-4 of
    // confidence mass on each side.
    let lo = cd.quantile(1e-4)?;
    let hi = cd.quantile(1.0 - 1e-4)?;
    let m = points.max(2);
    Ok(linspace(lo, hi, m)
        .into_iter()
        .map(|t| (t, cd.eval(t)))
        .collect())
}

/// Write a `theta,H` table. Gridded CDs dump their own knots; others are
/// evaluated on a window containing the central 1 - 2e-4 of the distribution.
pub fn write_cd_csv(cd: &ConfDist, path: &Path, points: usize) -> Result<()> {
    let rows = eval_grid(cd, points)?;
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "theta,H")?;
    for (t, h) in rows {
        writeln!(f, "{},{}", fmt_f64(t), fmt_f64(h))?;
    }
    Ok(())
}

/// Write a `theta,CV` table of the confidence curve 2 * min(H, 1 - H).
pub fn write_curve_csv(cd: &ConfDist, path: &Path, points: usize) -> Result<()> {
    let rows = eval_grid(cd, points)?;
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "theta,CV")?;
    for (t, h) in rows {
        let cv = 2.0 * h.min(1.0 - h);
        writeln!(f, "{},{}", fmt_f64(t), fmt_f64(cv))?;
    }
    Ok(())
}

/// Read a `theta,H` table back into a gridded CD.
pub fn read_cd_csv(path: &Path) -> Result<ConfDist> {
    let f = std::fs::File::open(path)?;
    let reader = BufReader::new(f);
    let mut theta = Vec::new();
    let mut h = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 {
            if line != "theta,H" {
                return Err(Error::Invalid(format!(
                    "expected header 'theta,H', got '{line}'"
                )));
            }
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let (a, b) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Invalid(format!("malformed row {}: '{line}'", i + 1))),
        };
        let t: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad theta on row {}: '{a}'", i + 1)))?;
        let v: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad H on row {}: '{b}'", i + 1)))?;
        theta.push(t);
        h.push(v);
    }
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("csv")
        .to_string();
    // Boundary semantics are not serialized; trust the producer's window.
    ConfDist::from_grid(theta, h, None, false, (Edge::Hard, Edge::Hard), label, "csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statkit::numeric::linspace;
    use crate::statkit::special::norm_cdf;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("confdist-io-{}-{}", std::process::id(), name));
        p
    }

    #[test]
    fn csv_round_trip_preserves_bits() {
        let theta = linspace(-4.0, 4.0, 201);
        let h: Vec<f64> = theta.iter().map(|&t| norm_cdf(t)).collect();
        let cd = ConfDist::from_grid(
            theta.clone(),
            h.clone(),
            None,
            false,
            (Edge::Free, Edge::Free),
            "t",
            "test",
        )
        .unwrap();
        let path = tmp("roundtrip.csv");
        write_cd_csv(&cd, &path, 0).unwrap();
        let back = read_cd_csv(&path).unwrap();
        let (t2, h2) = back.grid().unwrap();
        assert_eq!(&theta[..], t2);
        assert_eq!(&h[..], h2);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_write_is_deterministic() {
        let theta = linspace(-4.0, 4.0, 101);
        let h: Vec<f64> = theta.iter().map(|&t| norm_cdf(t)).collect();
        let cd = ConfDist::from_grid(theta, h, None, false, (Edge::Free, Edge::Free), "t", "test")
            .unwrap();
        let p1 = tmp("det1.csv");
        let p2 = tmp("det2.csv");
        write_cd_csv(&cd, &p1, 0).unwrap();
        write_cd_csv(&cd, &p2, 0).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        let b2 = std::fs::read(&p2).unwrap();
        assert_eq!(b1, b2);
        std::fs::remove_file(&p1).ok();
        std::fs::remove_file(&p2).ok();
    }

    #[test]
    fn curve_csv_has_curve_header() {
        let theta = linspace(-4.0, 4.0, 51);
        let h: Vec<f64> = theta.iter().map(|&t| norm_cdf(t)).collect();
        let cd = ConfDist::from_grid(theta, h, None, false, (Edge::Free, Edge::Free), "t", "test")
            .unwrap();
        let path = tmp("curve.csv");
        write_curve_csv(&cd, &path, 0).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("theta,CV\n"));
        // CV at the median knot is close to 1.
        let mid: f64 = text
            .lines()
            .nth(26)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert!(mid > 0.9);
        std::fs::remove_file(&path).ok();
    }
}
