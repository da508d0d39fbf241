//! Tabular output in CSV or JSON.
//!
//! Both formats put the column names on the first line, print floats with
//! 17 significant digits, write divergences as the string `inf`, and end
//! with a metadata record (a `#` comment block for CSV, a `metadata`
//! object for JSON). The two renderings of a table carry identical digit
//! strings, so they re-parse to identical values.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};
use spinmzi::Sensitivity;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Inf,
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// A float cell; `+∞` becomes the `inf` sentinel.
    pub fn num(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN reached the output layer");
        if x == f64::INFINITY {
            Cell::Inf
        } else {
            Cell::Num(x)
        }
    }

    pub fn sensitivity(s: Sensitivity<f64>) -> Self {
        match s {
            Sensitivity::Finite(v) => Cell::num(v),
            Sensitivity::Divergent => Cell::Inf,
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Inf => "inf".into(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_float(*x),
            Cell::Inf => Value::String("inf".into()),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        return "-inf".into();
    }
    format!("{x:.16e}")
}

fn json_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format_float(x));
    }
    let n: Number = format_float(x)
        .parse()
        .expect("formatted float is valid JSON");
    Value::Number(n)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from header"
        );
        self.rows.push(row);
    }
}

pub fn render(table: &Table, metadata: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table, metadata),
        Format::Json => render_json(table, metadata),
    }
}

fn render_csv(table: &Table, metadata: &Map<String, Value>) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text))
            .expect("in-memory write");
    }
    let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
    flatten_metadata("", &Value::Object(metadata.clone()), &mut out);
    out
}

fn flatten_metadata(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_metadata(&key, v, out);
            }
        }
        Value::String(s) => out.push_str(&format!("# {prefix} = {s}\n")),
        other => out.push_str(&format!("# {prefix} = {other}\n")),
    }
}

fn render_json(table: &Table, metadata: &Map<String, Value>) -> String {
    let to_line = |v: &Value| serde_json::to_string(v).expect("serializable");
    let mut out = format!(
        "{{\"columns\": {},\n\"rows\": [",
        to_line(&Value::from(table.columns.clone()))
    );
    for (i, row) in table.rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&to_line(&Value::Array(
            row.iter().map(Cell::json).collect(),
        )));
    }
    out.push_str("\n],\n\"metadata\": ");
    out.push_str(&to_line(&Value::Object(metadata.clone())));
    out.push_str("}\n");
    out
}

/// Writes `contents` to `path` through a sibling temporary file and a rename,
/// so a failed run never leaves a partial file behind. `None` means stdout.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(contents.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            });
    };
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file_name = path.file_name().ok_or_else(|| {
        io_err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "not a file path",
        ))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::write(&tmp, contents).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}
