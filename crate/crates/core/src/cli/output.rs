use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Provenance record written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved flag values, keyed by flag name without dashes.
    pub parameters: BTreeMap<String, Value>,
    pub code_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: BTreeMap<String, Value>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        }
    }

    /// Command-line arguments (after the program name) that reproduce the run.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        for (key, value) in &self.parameters {
            let text = match value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            args.push(format!("--{key}={text}"));
        }
        args
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_beside(&self, out: &Path) -> Result<PathBuf> {
        let path = Self::sidecar_path(out);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// `{schema_version, manifest, data}` wrapper for JSON outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonReport<T> {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub data: T,
}

/// Fixed 17-significant-digit scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// A flat numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|v| format_number(*v)))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.1), "-1.0000000000000001e-1");
        let v = std::f64::consts::PI * 1e-300;
        assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            header: vec!["x", "y"],
            rows: vec![vec![0.5, 2.0]],
        };
        assert_eq!(
            t.to_csv_string().unwrap(),
            "x,y\n5.0000000000000000e-1,2.0000000000000000e0\n"
        );
    }

    #[test]
    fn manifest_round_trip_and_args() {
        let mut params = BTreeMap::new();
        params.insert("points".to_string(), Value::from(11));
        params.insert("t-start".to_string(), Value::from(-0.25));
        params.insert("n-atoms".to_string(), Value::from("20,50"));
        let m = RunManifest::new("sweep", params);
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(
            m.to_args(),
            vec!["sweep", "--n-atoms=20,50", "--points=11", "--t-start=-0.25"]
        );
        assert_eq!(
            RunManifest::sidecar_path(Path::new("/tmp/a.csv")),
            PathBuf::from("/tmp/a.csv.manifest.json")
        );
    }
}
