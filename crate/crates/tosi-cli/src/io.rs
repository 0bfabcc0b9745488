//! Input handling: CSV matrices, index-set files, digests, and grids.

use crate::CliError;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;
use tosi::numerics::DataMatrix;

/// A loaded CSV file: header names, numeric body, and provenance.
pub struct CsvInput {
    pub headers: Vec<String>,
    pub data: DataMatrix,
    pub sha256: String,
    pub path: String,
}

/// Reads a comma-delimited file with a mandatory header row. Cells must be
/// finite numbers (decimal point, scientific notation accepted); anything
/// else is an input error naming the offending row and column.
pub fn read_csv(path: &Path) -> Result<CsvInput, CliError> {
    let raw = fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex_digest(&raw);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(raw.as_slice());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: bad header row: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(CliError::input(format!("{}: empty header row", path.display())));
    }
    let width = headers.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // Data rows are 1-based and exclude the header line.
        let rownum = i + 1;
        let record = record
            .map_err(|e| CliError::input(format!("{}: row {rownum}: {e}", path.display())))?;
        if record.len() != width {
            return Err(CliError::input(format!(
                "{}: row {rownum} has {} fields, expected {width}",
                path.display(),
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(width);
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| {
                CliError::input(format!(
                    "{}: row {rownum}, column '{}': cannot parse '{cell}' as a number",
                    path.display(),
                    headers[j]
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::input(format!(
                    "{}: row {rownum}, column '{}': non-finite value '{cell}'",
                    path.display(),
                    headers[j]
                )));
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    let data = DataMatrix::from_rows(&rows)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(CsvInput { headers, data, sha256, path: path.display().to_string() })
}

/// Reads a variable-index set: one 1-based integer per line, blank lines
/// skipped, `#` starts a comment (whole-line or trailing). Indices must lie
/// in 1..=p; duplicates collapse. Returns a sorted set.
pub fn read_set_file(path: &Path, p: usize) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut indices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let idx: usize = body.parse().map_err(|_| {
            CliError::input(format!(
                "{}: line {}: expected a 1-based variable index, got '{body}'",
                path.display(),
                i + 1
            ))
        })?;
        if idx == 0 || idx > p {
            return Err(CliError::input(format!(
                "{}: line {}: index {idx} outside 1..={p}",
                path.display(),
                i + 1
            )));
        }
        indices.push(idx);
    }
    if indices.is_empty() {
        return Err(CliError::input(format!("{}: set file selects no variables", path.display())));
    }
    indices.sort_unstable();
    indices.dedup();
    Ok(indices)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses a lambda grid: either a comma list ("0.4,0.2,0.1") or a
/// geometric range "min:max:count" with `count` logarithmically spaced
/// values from max down to min.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::input("lambda grid is empty".into()));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::input(format!(
                "grid range must be min:max:count, got '{spec}'"
            )));
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::input(format!("bad grid minimum '{}'", parts[0])))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::input(format!("bad grid maximum '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::input(format!("bad grid count '{}'", parts[2])))?;
        if !(min > 0.0 && max >= min) || count == 0 {
            return Err(CliError::input(format!(
                "grid range needs 0 < min <= max and count >= 1, got '{spec}'"
            )));
        }
        if count == 1 {
            return Ok(vec![max]);
        }
        let ratio = (min / max).powf(1.0 / (count as f64 - 1.0));
        return Ok((0..count).map(|k| max * ratio.powi(k as i32)).collect());
    }
    let mut grid = Vec::new();
    for tok in spec.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| CliError::input(format!("bad grid value '{tok}'")))?;
        if !(v > 0.0) {
            return Err(CliError::input(format!("grid values must be positive, got '{tok}'")));
        }
        grid.push(v);
    }
    if grid.is_empty() {
        return Err(CliError::input("lambda grid is empty".into()));
    }
    Ok(grid)
}
