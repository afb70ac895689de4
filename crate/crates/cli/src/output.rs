use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Output directory whose every file carries the config hash.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    hash: String,
}

impl OutputDir {
    pub fn create(root: &Path, hash: &str) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), hash: hash.to_string() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Opens `name` with the `# config_hash:` comment already written.
    pub fn csv_writer(&self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# config_hash: {}", self.hash).map_err(|e| CliError::io(&path, e))?;
        Ok((path, w))
    }

    pub fn write_csv<I>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let (path, w) = self.csv_writer(name)?;
        let mut csv = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::io(&path, e.into());
        csv.write_record(header).map_err(io)?;
        for row in rows {
            csv.write_record(&row).map_err(io)?;
        }
        csv.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Writes a JSON object with `config_hash` added; keys are sorted.
    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let mut obj = match serde_json::to_value(body).map_err(|e| CliError::Config(e.to_string()))? {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("data".into(), other);
                m
            }
        };
        obj.insert("config_hash".into(), Value::String(self.hash.clone()));
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json value serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub fn fmt(x: f64) -> String {
    format!("{x}")
}
