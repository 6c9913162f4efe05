//! Output files: the iteration CSV, `key: value` reports and grading files.
//! Every file is written to a temporary sibling and renamed into place.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use colotame_core::inverse::InversionResult;
use colotame_core::Grading;
use tempfile::NamedTempFile;

use crate::error::CliError;

pub const CSV_HEADER: [&str; 4] = ["iter", "increment", "ratio", "residual"];

/// Shortest round-trip form; exponent notation outside `[1e-6, 1e16)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-6..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// One row per increment; an unresolved ratio is an empty field.
pub fn result_csv(result: &InversionResult) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for (i, inc) in result.increments.iter().enumerate() {
        let ratio = result.ratios[i].map(fmt_f64).unwrap_or_default();
        w.write_record([
            (i + 1).to_string(),
            fmt_f64(*inc),
            ratio,
            fmt_f64(result.residuals[i]),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Ordered `key: value` lines.
#[derive(Debug, Default, Clone)]
pub struct Report(Vec<(String, String)>);

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn put_list(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let joined = values
            .iter()
            .map(|&v| fmt_f64(v))
            .collect::<Vec<_>>()
            .join(", ");
        self.put(key, joined)
    }

    pub fn put_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.put(key, fmt_f64(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

/// Grading entries separated by commas or whitespace; `#` starts a comment.
pub fn parse_grading(text: &str) -> Result<Grading, CliError> {
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Config(format!("grading entry `{t}` is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Grading::new(values).map_err(CliError::from)
}

pub fn load_grading(path: &Path) -> Result<Grading, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_grading(&text)
}
