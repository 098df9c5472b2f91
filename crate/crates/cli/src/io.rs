use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgdg::linalg::Matrix;
use sgdg::Graph;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A numeric table with named columns. Missing values are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub data: Matrix<f64>,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.data.rows()
    }

    pub fn k(&self) -> usize {
        self.data.cols()
    }

    /// Reorders columns so that new column `p` is old column `perm[p]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Dataset {
        Dataset {
            columns: perm.iter().map(|&c| self.columns[c].clone()).collect(),
            data: Matrix::from_fn(self.n(), perm.len(), |j, p| self.data[(j, perm[p])]),
            digest: self.digest.clone(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Header row, comma separated, `.` decimal point.
pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let bytes = read_bytes(path)?;
    let digest = sha256_hex(&bytes);
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let columns: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::parse(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if columns.is_empty() {
        return Err(CliError::Data(format!("{}: no columns", path.display())));
    }
    let k = columns.len();
    let mut values = Vec::new();
    let mut n = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(path, e))?;
        let line = row + 2;
        if rec.len() != k {
            return Err(CliError::Data(format!(
                "{}: line {line} has {} fields, header has {k}",
                path.display(),
                rec.len()
            )));
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "{}: line {line}, column '{}': missing or non-numeric value '{field}'",
                        path.display(),
                        columns[c]
                    ))
                })?;
            values.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset {
        columns,
        data: Matrix::from_fn(n, k, |j, c| values[j * k + c]),
        digest,
    })
}

pub fn write_dataset(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e.into()))?;
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(columns).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Graph file: `{"k": 5, "edges": [[1, 2], ...], "labels": [...]}` with
/// 1-based vertices. `labels` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn read_graph(path: &Path) -> Result<GraphSpec, CliError> {
    let bytes = read_bytes(path)?;
    let spec: GraphSpec = serde_json::from_slice(&bytes).map_err(|e| CliError::parse(path, e))?;
    if let Some(l) = &spec.labels {
        if l.len() != spec.graph.k() {
            return Err(CliError::parse(
                path,
                format!("{} labels for {} vertices", l.len(), spec.graph.k()),
            ));
        }
    }
    Ok(spec)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::parse(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(path, e))?;
    s.push('\n');
    write_text(path, &s)
}

pub fn write_text(path: &Path, s: &str) -> Result<(), CliError> {
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
