use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    /// TOML document with one `[[rows]]` table per record.
    Text,
}

#[derive(Serialize)]
struct Rows<'a, T> {
    rows: &'a [T],
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Text => toml::to_string(&Rows { rows }).map(String::into_bytes).map_err(|e| CliError::Output(e.to_string())),
    }
}

/// Writes the fully rendered report in one go, to `out` or stdout.
pub fn emit(bytes: &[u8], out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
