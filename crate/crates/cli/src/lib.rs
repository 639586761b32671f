//! Driver behind the `elldyn` binary: option handling, dispatch and output
//! rendering. Output records live in [`schema`].

pub mod commands;
pub mod config;
pub mod schema;

use std::io::Write;

use clap::Parser;
use serde_json::Value;

use config::{Cli, Format};

/// Exit code for a failed precondition of the requested computation.
pub const EXIT_PRECONDITION: i32 = 2;
/// Exit code for unparseable flags, config or input values.
pub const EXIT_PARSE: i32 = 3;
/// Exit code when output cannot be written.
pub const EXIT_IO: i32 = 1;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Precondition(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<elldyn::Error> for CliError {
    fn from(e: elldyn::Error) -> Self {
        CliError::Precondition(e.to_string())
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// CSV form of a document. Commands with a `rows` table print one line per
/// row, each prefixed by the schema version and command; anything else is
/// printed as `key,value` pairs with dotted paths for nested fields.
pub fn render_csv(doc: &Value) -> Result<String, CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows = doc.get("rows").and_then(Value::as_array);
    match rows {
        Some(rows) if !rows.is_empty() => {
            let head = [scalar(&doc["schema_version"]), scalar(&doc["command"])];
            let mut header = vec!["schema_version".to_string(), "command".to_string()];
            let mut first = Vec::new();
            flatten("", &rows[0], &mut first);
            header.extend(first.into_iter().map(|(k, _)| k));
            w.write_record(&header).map_err(io)?;
            for row in rows {
                let mut cells = Vec::new();
                flatten("", row, &mut cells);
                let record = head.iter().cloned().chain(cells.into_iter().map(|(_, v)| v));
                w.write_record(record).map_err(io)?;
            }
        }
        _ => {
            w.write_record(["key", "value"]).map_err(io)?;
            let mut pairs = Vec::new();
            flatten("", doc, &mut pairs);
            for (k, v) in pairs {
                w.write_record([k, v]).map_err(io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn render(doc: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => serde_json::to_string_pretty(doc)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Io(e.to_string())),
        Format::Csv => render_csv(doc),
    }
}

/// Parse `args`, run the command and write its output. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("elldyn: {e}");
            e.exit_code()
        }
    }
}

fn execute(mut cli: Cli) -> Result<(), CliError> {
    cli.options.load_config()?;
    let doc = commands::run(cli.command, &cli.options)?;
    let text = render(&doc, cli.options.format.unwrap_or_default())?;
    match &cli.options.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
