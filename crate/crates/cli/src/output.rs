//! CSV files with a `#`-prefixed JSON header line.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! same inputs always produce byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const UNITS: &str = "hbar = mu = 1; lengths in units of the initial radius a when a = 1";

/// Header object shared by every output file.
pub fn header(command: &str, settings: Value) -> Value {
    json!({ "command": command, "units": UNITS, "settings": settings })
}

pub struct CsvOutput {
    writer: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
    footer: Vec<String>,
}

impl CsvOutput {
    /// Opens `path` (or standard output) and writes the header line and the
    /// column names.
    pub fn create(path: Option<&Path>, header: &Value, columns: &[&str]) -> Result<Self> {
        let mut sink: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
                }
                Box::new(BufWriter::new(File::create(p).map_err(CliError::io(p))?))
            }
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let path = path.map(Path::to_path_buf);
        writeln!(sink, "# {header}").map_err(CliError::io(path.clone().unwrap_or_else(|| "<stdout>".into())))?;
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(columns)?;
        Ok(Self { writer, path, footer: Vec::new() })
    }

    pub fn row(&mut self, fields: &[Field]) -> Result<()> {
        self.writer.write_record(fields.iter().map(Field::render))?;
        Ok(())
    }

    /// A `#` comment line, written after the last row.
    pub fn comment(&mut self, text: &str) {
        self.footer.push(text.to_string());
    }

    pub fn finish(self) -> Result<()> {
        let err = CliError::io(self.path.clone().unwrap_or_else(|| "<stdout>".into()));
        let mut sink = self.writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        let written = self.footer.iter().try_for_each(|line| writeln!(sink, "# {line}")).and_then(|_| sink.flush());
        written.map_err(err)
    }

}

/// One CSV cell.
pub enum Field<'a> {
    Num(f64),
    Int(i64),
    Text(&'a str),
}

impl Field<'_> {
    fn render(&self) -> String {
        match self {
            Field::Num(v) => format!("{v:?}"),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => s.to_string(),
        }
    }
}

impl From<f64> for Field<'_> {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

/// Writes pretty-printed JSON to `path`.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialise");
    std::fs::write(path, text + "\n").map_err(CliError::io(path))
}
