//! Result rendering and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{json, Value};
use uhpcflex::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows for the CSV rendering of a result.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::output)?;
        for r in &self.rows {
            w.write_record(r).map_err(CliError::output)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::output(e.to_string()))?;
        String::from_utf8(bytes).map_err(CliError::output)
    }
}

/// What a command produced. `sidecars` are extra files written next to
/// `--out` under the given suffix.
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub sidecars: Vec<(&'static str, Value)>,
    /// Exit code for a successful run that still signals something (3 for
    /// failed acceptance thresholds).
    pub code: i32,
}

impl Report {
    pub fn new(json: Value, table: Table) -> Self {
        Report { json, table, sidecars: Vec::new(), code: 0 }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(pretty(&self.json)),
            Format::Csv => self.table.to_csv(),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    /// Extra machine-readable context kept in the error report.
    pub detail: Option<Value>,
}

impl CliError {
    pub fn input(message: impl std::fmt::Display) -> Self {
        CliError { code: 1, kind: "BadInput".into(), message: message.to_string(), detail: None }
    }

    pub fn output(message: impl std::fmt::Display) -> Self {
        CliError { code: 1, kind: "Io".into(), message: message.to_string(), detail: None }
    }

    pub fn report(&self) -> Value {
        let mut v = json!({ "error": { "kind": self.kind, "message": self.message, "exit_code": self.code } });
        if let Some(d) = &self.detail {
            v["error"]["detail"] = d.clone();
        }
        v
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConvergenceFailure(_) | Error::NoEquilibrium(_) => 2,
            _ => 1,
        };
        CliError { code, kind: e.kind().to_string(), message: e.to_string(), detail: None }
    }
}

/// `curve.csv` + `.events.json` → `curve.events.json`.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

/// Writes through a temporary file in the target directory so a reader never
/// sees a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: &dyn std::fmt::Display| CliError::output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

/// Sends a successful result to `--out` (with sidecars) or stdout.
pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = report.render(format)?;
    match out {
        Some(path) => {
            // render everything first so nothing is written if a sidecar fails
            let sidecars: Vec<(PathBuf, String)> =
                report.sidecars.iter().map(|(suffix, v)| (sidecar_path(path, suffix), pretty(v))).collect();
            write_atomic(path, &text)?;
            for (p, body) in sidecars {
                write_atomic(&p, &body)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(CliError::output)?;
        }
    }
    Ok(())
}

/// Error path: a JSON report to `--out` when given, a message on stderr always.
pub fn emit_error(err: &CliError, out: Option<&Path>) {
    eprintln!("error: {}", err.message);
    if let Some(path) = out {
        if let Err(e) = write_atomic(path, &pretty(&err.report())) {
            eprintln!("error: could not write the error report: {}", e.message);
        }
    }
}
