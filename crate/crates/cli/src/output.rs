//! Scenario artifacts and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| Cell::Num(*v)).collect());
    }

    fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

#[derive(Debug, Clone)]
pub enum Payload {
    Table(Table),
    /// Written verbatim as JSON regardless of the tabular format.
    Json(Value),
}

#[derive(Debug, Clone)]
pub struct Artifact {
    /// File stem; the extension follows the payload and format.
    pub stem: &'static str,
    pub payload: Payload,
}

impl Artifact {
    pub fn table(stem: &'static str, table: Table) -> Self {
        Self { stem, payload: Payload::Table(table) }
    }

    pub fn json(stem: &'static str, value: Value) -> Self {
        Self { stem, payload: Payload::Json(value) }
    }

    fn render(&self, format: Format) -> Result<(String, Vec<u8>), String> {
        match (&self.payload, format) {
            (Payload::Table(t), Format::Csv) => Ok((format!("{}.csv", self.stem), t.to_csv().map_err(|e| e.to_string())?)),
            (Payload::Table(t), Format::Json) => Ok((format!("{}.json", self.stem), pretty(&json!(t))?)),
            (Payload::Json(v), _) => Ok((format!("{}.json", self.stem), pretty(v)?)),
        }
    }
}

fn pretty(v: &Value) -> Result<Vec<u8>, String> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization failed: {0}")]
    Encode(String),
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), WriteError> {
    fs::write(path, bytes).map_err(|source| WriteError::Io { path: path.to_path_buf(), source })
}

/// Writes every artifact into `dir` followed by `manifest.json`, which records
/// the resolved config, library version, SHA-256 of each file and a timestamp.
/// Returns the written file names, manifest last.
pub fn write_run(dir: &Path, config: &ScenarioConfig, artifacts: &[Artifact]) -> Result<Vec<String>, WriteError> {
    let rendered: Vec<(String, Vec<u8>)> =
        artifacts.iter().map(|a| a.render(config.format)).collect::<Result<_, _>>().map_err(WriteError::Encode)?;
    fs::create_dir_all(dir).map_err(|source| WriteError::Io { path: dir.to_path_buf(), source })?;
    let mut outputs = serde_json::Map::new();
    for (name, bytes) in &rendered {
        write_file(&dir.join(name), bytes)?;
        outputs.insert(name.clone(), Value::String(hex::encode(Sha256::digest(bytes))));
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "config": config,
        "library_version": squeezed::VERSION,
        "seed": config.seed,
        "outputs": outputs,
        "timestamp_unix": timestamp,
    });
    write_file(&dir.join(MANIFEST), &pretty(&manifest).map_err(WriteError::Encode)?)?;
    let mut names: Vec<String> = rendered.into_iter().map(|(n, _)| n).collect();
    names.push(MANIFEST.to_string());
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["a", "b"]);
        t.push_nums(&[1.0, 0.125]);
        t.push(vec!["x".into(), 2.5.into()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n1,0.125\nx,2.5\n");
    }
}
