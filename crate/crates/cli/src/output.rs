//! Result records: JSON lines, CSV tables and plain text.
//!
//! Every record carries the tool name, version, subcommand and resolved
//! parameters. JSON floats use the shortest representation that reads back
//! exactly; CSV and text print 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Params;
use crate::CliError;

pub const TOOL: &str = "disclab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `v` with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A fixed-column table for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(scalar).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Output of one subcommand.
#[derive(Debug)]
pub struct Artifact {
    pub result: Value,
    /// Table written for `--out *.csv`; without one the result is flattened
    /// to `key,value` rows.
    pub table: Option<Table>,
    /// Set for assertion-style commands whose check failed.
    pub failure: Option<String>,
}

impl Artifact {
    pub fn new(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Self {
            result: serde_json::to_value(result).map_err(disclab_core::Error::from)?,
            table: None,
            failure: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn fail_unless(mut self, ok: bool, message: impl FnOnce() -> String) -> Self {
        if !ok {
            self.failure = Some(message());
        }
        self
    }
}

#[derive(Serialize)]
struct Record<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Params,
    result: &'a Value,
}

/// Format of the primary output.
#[derive(Clone, Debug, Default)]
pub struct Sink {
    pub json: bool,
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Write to `--out` (if given) and print to stdout.
    pub fn emit(&self, command: &str, params: &Params, artifact: &Artifact) -> Result<(), CliError> {
        let line = self.write_out(command, params, artifact)?;
        let stdout = if self.json {
            format!("{line}\n")
        } else {
            text(command, &artifact.result)
        };
        print(&stdout)
    }

    /// Write to `--out` only; returns the JSON record.
    pub fn write_out(&self, command: &str, params: &Params, artifact: &Artifact) -> Result<String, CliError> {
        let record = Record {
            tool: TOOL,
            version: VERSION,
            command,
            config: params,
            result: &artifact.result,
        };
        let line = serde_json::to_string(&record).map_err(disclab_core::Error::from)?;
        match &self.out {
            Some(path) if is_csv(path) => {
                let mut body = format!("# {line}\n");
                body.push_str(&match &artifact.table {
                    Some(t) => t.to_csv(),
                    None => flat_table(&artifact.result).to_csv(),
                });
                write_file(path, &body)?;
            }
            Some(path) => write_file(path, &format!("{line}\n"))?,
            None => {}
        }
        Ok(line)
    }
}

pub fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body)
        .map_err(|source| disclab_core::Error::Io {
            path: path.to_path_buf(),
            source,
        })
        .map_err(CliError::from)
}

pub fn print(s: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not an error worth reporting.
    match out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("writing output: {e}"))),
        _ => Ok(()),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            rows.push((prefix.to_string(), Value::String(joined.join(" "))));
        }
        other => rows.push((prefix.to_string(), other.clone())),
    }
}

fn flat_table(v: &Value) -> Table {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut t = Table::new(&["key", "value"]);
    for (k, x) in rows {
        t.push(vec![Value::String(k), x]);
    }
    t
}

fn text(command: &str, v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut s = format!("{TOOL} {VERSION} {command}\n");
    for (k, x) in rows {
        let _ = writeln!(s, "  {k} = {}", scalar(&x));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(3.0), "3.0000000000000000e0");
        assert_eq!(fmt_float(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn flattening() {
        let v = serde_json::json!({"a": 1, "b": {"c": [1.5, 2.5]}, "d": [{"e": true}]});
        let t = flat_table(&v);
        let keys: Vec<&str> = t.rows.iter().map(|r| r[0].as_str().unwrap()).collect();
        assert_eq!(keys, ["a", "b.c", "d[0].e"]);
    }
}
