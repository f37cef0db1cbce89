//! Data-file readers. Values are whitespace- or comma-separated reals; paired
//! inputs take exactly two per line. Blank lines and `#` comments are skipped.

use std::path::Path;

use anyhow::{bail, Context, Result};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_tok(path: &Path, lineno: usize, tok: &str) -> Result<f64> {
    tok.parse()
        .with_context(|| format!("{}:{lineno}: bad number '{tok}'", path.display()))
}

pub fn read_reals(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in data_lines(&text) {
        for tok in line.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
            out.push(parse_tok(path, lineno, tok)?);
        }
    }
    if out.is_empty() {
        bail!("{}: no data", path.display());
    }
    Ok(out)
}

pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in data_lines(&text) {
        let toks: Vec<&str> = line.split([',', ' ', '\t']).filter(|t| !t.is_empty()).collect();
        if toks.len() != 2 {
            bail!(
                "{}:{lineno}: expected two values per line, got {}",
                path.display(),
                toks.len()
            );
        }
        out.push((parse_tok(path, lineno, toks[0])?, parse_tok(path, lineno, toks[1])?));
    }
    if out.is_empty() {
        bail!("{}: no data", path.display());
    }
    Ok(out)
}
