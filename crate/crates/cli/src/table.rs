use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Format, Params};
use crate::CliError;

/// One table entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Self::Int(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Missing, Into::into)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Float(v) => Some(*v),
            Self::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Self::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Self::Float(v) => format_float(*v),
            Self::Int(v) => v.to_string(),
            Self::Bool(b) => b.to_string(),
            Self::Text(s) => s.clone(),
            Self::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            // non-finite floats have no JSON literal
            Self::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Self::Int(v) => Value::from(*v),
            Self::Bool(b) => Value::Bool(*b),
            Self::Text(s) => Value::String(s.clone()),
            Self::Missing => Value::Null,
        }
    }
}

/// Shortest decimal string that parses back to the same `f64`.
///
/// Plain notation for magnitudes in `[1e-5, 1e16)`, exponent notation
/// otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical resolved config.
    pub config_hash: String,
    pub artifact_version: String,
    pub command: String,
    pub seed: u64,
}

impl Provenance {
    pub fn for_config(config: &ExperimentConfig, params: &Params) -> Result<Self, CliError> {
        Ok(Self {
            config_hash: config_hash(config, params)?,
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            command: config.command.name().into(),
            seed: config.seed,
        })
    }
}

/// Hash of `{command, params, seed}` with defaults filled and keys sorted.
/// The output path and format do not enter.
pub fn config_hash(config: &ExperimentConfig, params: &Params) -> Result<String, CliError> {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(config.command.name()));
    m.insert("params".into(), serde_json::to_value(params)?);
    m.insert("seed".into(), Value::from(config.seed));
    let canonical = serde_json::to_string(&Value::Object(m))?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results that are not per-row.
    pub summary: BTreeMap<String, Cell>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: &[&str], provenance: Provenance) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }

    /// Provenance and summary as `# key=value` lines, then the header and
    /// rows, LF-terminated.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        let p = &self.provenance;
        writeln!(out, "# config_hash={}", p.config_hash)?;
        writeln!(out, "# artifact_version={}", p.artifact_version)?;
        writeln!(out, "# command={}", p.command)?;
        writeln!(out, "# seed={}", p.seed)?;
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={}", v.to_csv_field())?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.into_inner().map_err(|e| CliError::Io {
            path: "<buffer>".into(),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with sorted keys; each row is an object keyed by column.
    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut m = Map::new();
        m.insert("columns".into(), serde_json::to_value(&self.columns)?);
        m.insert("provenance".into(), serde_json::to_value(&self.provenance)?);
        m.insert("rows".into(), Value::Array(rows));
        m.insert("summary".into(), Value::Object(summary));
        let mut out = serde_json::to_vec_pretty(&Value::Object(m))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes the table to `path`.
pub fn emit(table: &ResultTable, path: &Path, format: Format) -> Result<(), CliError> {
    let bytes = table.to_bytes(format)?;
    fs::write(path, bytes).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance {
            config_hash: "abc".into(),
            artifact_version: "0.1.0".into(),
            command: "morgan".into(),
            seed: 0,
        }
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-2.25e-9), "-2.25e-9");
        assert_eq!(format_float(1e20), "1e20");
        assert_eq!(format_float(0.1 + 0.2), "0.30000000000000004");
        for v in [
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
            5e-324,
            f64::MAX,
        ] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(&["r", "threshold"], prov());
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["r,threshold"]);
        assert!(s.starts_with("# config_hash=abc\n"));
        assert!(!s.contains('\r'));
    }

    #[test]
    fn json_keys_sorted_with_provenance() {
        let mut t = ResultTable::new(&["z", "a"], prov());
        t.push(vec![Cell::Float(0.5), Cell::Text("x".into())]);
        t.set("kappa", 0.5);
        let s = String::from_utf8(t.to_json().unwrap()).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["provenance"]["config_hash"], "abc");
        assert_eq!(v["rows"][0]["z"], 0.5);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["columns", "provenance", "rows", "summary"]);
        assert!(s.find("\"a\": \"x\"").unwrap() < s.find("\"z\": 0.5").unwrap());
    }
}
