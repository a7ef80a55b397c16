//! Plain-text file formats for matrices and trajectories.
//!
//! Matrix files: a header line `# driftrec-matrix p=<int>` followed by p rows
//! of p comma-separated floats. Trajectory files: a header line
//! `# driftrec-traj p=<int> n=<int> eta=<float> model=<tag>` followed by n+1
//! rows. Floats are written with Rust's shortest round-trip formatting, so
//! write/read is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{DriftError, Result};
use crate::sim::Trajectory;

fn parse_kv<'a>(field: &'a str, key: &str) -> Result<&'a str> {
    field
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| DriftError::Parse(format!("expected `{key}=<value>`, got `{field}`")))
}

fn parse_row(line: &str, width: usize, lineno: usize) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> =
        line.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| DriftError::Parse(format!("line {lineno}: {e}")))?;
    if vals.len() != width {
        return Err(DriftError::Parse(format!(
            "line {lineno}: expected {width} values, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn format_rows(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", m[(i, j)]);
        }
        out.push('\n');
    }
}

pub fn matrix_to_string(m: &DMatrix<f64>) -> String {
    let mut out = format!("# driftrec-matrix p={}\n", m.nrows());
    format_rows(&mut out, m);
    out
}

pub fn matrix_from_str(s: &str) -> Result<DMatrix<f64>> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| DriftError::Parse("empty matrix file".into()))?;
    let rest = header
        .strip_prefix("# driftrec-matrix ")
        .ok_or_else(|| DriftError::Parse(format!("bad matrix header: `{header}`")))?;
    let p: usize = parse_kv(rest.trim(), "p")?
        .parse()
        .map_err(|e| DriftError::Parse(format!("bad p: {e}")))?;
    let mut data = Vec::with_capacity(p * p);
    let mut rows = 0usize;
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        data.extend(parse_row(line, p, idx + 2)?);
        rows += 1;
    }
    if rows != p {
        return Err(DriftError::Parse(format!("expected {p} rows, got {rows}")));
    }
    Ok(DMatrix::from_row_slice(p, p, &data))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, matrix_to_string(m))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    matrix_from_str(&fs::read_to_string(path)?)
}

pub fn trajectory_to_string(t: &Trajectory) -> String {
    let mut out = format!(
        "# driftrec-traj p={} n={} eta={} model={}\n",
        t.p,
        t.states.nrows() - 1,
        t.eta,
        t.model_tag
    );
    format_rows(&mut out, &t.states);
    out
}

pub fn trajectory_from_str(s: &str) -> Result<Trajectory> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| DriftError::Parse("empty trajectory file".into()))?;
    let rest = header
        .strip_prefix("# driftrec-traj ")
        .ok_or_else(|| DriftError::Parse(format!("bad trajectory header: `{header}`")))?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(DriftError::Parse(format!("bad trajectory header: `{header}`")));
    }
    let p: usize =
        parse_kv(fields[0], "p")?.parse().map_err(|e| DriftError::Parse(format!("bad p: {e}")))?;
    let n: usize =
        parse_kv(fields[1], "n")?.parse().map_err(|e| DriftError::Parse(format!("bad n: {e}")))?;
    let eta: f64 = parse_kv(fields[2], "eta")?
        .parse()
        .map_err(|e| DriftError::Parse(format!("bad eta: {e}")))?;
    let model_tag = parse_kv(fields[3], "model")?.to_string();

    // mass-spring state rows are wider than p; infer width from the first row
    let mut data = Vec::new();
    let mut width = 0usize;
    let mut rows = 0usize;
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if width == 0 {
            width = line.split(',').count();
        }
        data.extend(parse_row(line, width, idx + 2)?);
        rows += 1;
    }
    if rows != n + 1 {
        return Err(DriftError::Parse(format!("expected {} rows, got {rows}", n + 1)));
    }
    Ok(Trajectory { states: DMatrix::from_row_slice(rows, width, &data), eta, p, seed: 0, model_tag })
}

pub fn write_trajectory(path: &Path, t: &Trajectory) -> Result<()> {
    fs::write(path, trajectory_to_string(t))?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    trajectory_from_str(&fs::read_to_string(path)?)
}
